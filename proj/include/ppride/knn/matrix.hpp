#pragma once

#include <Eigen/Dense>

#include "ppride/knn/params.hpp"

namespace ppride::knn {

/// Condition number estimate (L1) of a square matrix, via its LU factors.
/// Returns +inf for a numerically singular matrix.
double condition_estimate(const Eigen::MatrixXd& a);

/// Dense matrix with entries uniform in [-bound, bound].
Eigen::MatrixXd random_matrix(std::size_t n, double bound, Rng& rng);

struct InvertibleDraw {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd inverse;
};

/// Draws a random matrix whose condition estimate is within field.max_condition,
/// retrying up to field.max_retries times before throwing KeyGenerationError.
InvertibleDraw random_invertible(std::size_t n, const NumericField& field, Rng& rng);

/// Draws P, Q with P + Q == target and both well conditioned.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_invertible_split(const Eigen::MatrixXd& target,
                                                                    const NumericField& field,
                                                                    Rng& rng);

}  // namespace ppride::knn
