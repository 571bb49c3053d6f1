#include "ppride/knn/matrix.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ppride::knn {

namespace {

double condition_of(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  const double rc = lu.rcond();
  if (!(rc > 0) || !std::isfinite(rc)) return std::numeric_limits<double>::infinity();
  return 1.0 / rc;
}

}  // namespace

double condition_estimate(const Eigen::MatrixXd& a) {
  return condition_of(Eigen::PartialPivLU<Eigen::MatrixXd>(a));
}

Eigen::MatrixXd random_matrix(std::size_t n, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd a(n, n);
  // column-major fill; the draw order is part of the determinism contract
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = dist(rng);
  }
  return a;
}

InvertibleDraw random_invertible(std::size_t n, const NumericField& field, Rng& rng) {
  for (int attempt = 0; attempt < field.max_retries; ++attempt) {
    Eigen::MatrixXd a = random_matrix(n, field.entry_bound, rng);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (condition_of(lu) <= field.max_condition) {
      Eigen::MatrixXd inv = lu.inverse();
      return {std::move(a), std::move(inv)};
    }
  }
  throw KeyGenerationError("no invertible " + std::to_string(n) + "x" + std::to_string(n) +
                           " draw within " + std::to_string(field.max_retries) + " attempts");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_invertible_split(const Eigen::MatrixXd& target,
                                                                    const NumericField& field,
                                                                    Rng& rng) {
  const auto n = static_cast<std::size_t>(target.rows());
  for (int attempt = 0; attempt < field.max_retries; ++attempt) {
    Eigen::MatrixXd p = random_matrix(n, field.entry_bound, rng);
    if (condition_estimate(p) > field.max_condition) continue;
    Eigen::MatrixXd q = target - p;
    if (condition_estimate(q) > field.max_condition) continue;
    return {std::move(p), std::move(q)};
  }
  throw KeyGenerationError("no invertible split of a " + std::to_string(n) + "x" +
                           std::to_string(n) + " matrix within " +
                           std::to_string(field.max_retries) + " attempts");
}

}  // namespace ppride::knn
