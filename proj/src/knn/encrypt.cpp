#include "ppride/knn/encrypt.hpp"

#include <stdexcept>
#include <string>

namespace ppride::knn {

SplitShares split_vector(std::span<const std::uint8_t> v, std::span<const std::uint8_t> s,
                         Party party, Rng& rng) {
  if (v.size() != s.size()) {
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " does not match split vector length " + std::to_string(s.size()));
  }
  std::uniform_real_distribution<double> share(-1.0, 1.0);
  const std::uint8_t split_on = party == Party::Driver ? 1 : 0;
  SplitShares out{Eigen::VectorXd(v.size()), Eigen::VectorXd(v.size())};
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = v[j];
    const auto jj = static_cast<Eigen::Index>(j);
    if (s[j] == split_on) {
      const double r = share(rng);
      out.first[jj] = r;
      out.second[jj] = x - r;
    } else {
      out.first[jj] = x;
      out.second[jj] = x;
    }
  }
  return out;
}

EncryptedIndex encrypt_index(std::span<const std::uint8_t> v, const UserKeySet& keys, Rng& rng) {
  if (v.size() != keys.dim()) {
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " does not match key dimension " + std::to_string(keys.dim()));
  }
  const Role role = keys.role();
  const auto shares = split_vector(v, keys.split(), party_of(role), rng);
  const bool column = is_driver(role);
  EncryptedIndex::Parts parts;
  for (std::size_t i = 0; i < EncryptedIndex::kParts; ++i) {
    const Eigen::VectorXd& half = i < 4 ? shares.first : shares.second;
    // driver: K_i * v (column); rider: v^T * K_i (row), stored transposed
    if (column) {
      parts[i].noalias() = keys.part(i) * half;
    } else {
      parts[i].noalias() = keys.part(i).transpose() * half;
    }
  }
  return EncryptedIndex(scheme_of(role), orientation_of(role), std::move(parts));
}

}  // namespace ppride::knn
