#pragma once

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "ppride/knn/encrypted_index.hpp"
#include "ppride/knn/keys.hpp"

namespace ppride::knn {

enum class Party : std::uint8_t { Driver, Rider };

constexpr Party party_of(Role r) { return is_driver(r) ? Party::Driver : Party::Rider; }

struct SplitShares {
  Eigen::VectorXd first;   // v'
  Eigen::VectorXd second;  // v''
};

/// Driver party copies v[j] into both shares where s[j] == 0 and splits it
/// into two random summands where s[j] == 1; the rider party does the
/// opposite. Random shares are uniform in [-1, 1].
SplitShares split_vector(std::span<const std::uint8_t> v, std::span<const std::uint8_t> s,
                         Party party, Rng& rng);

/// Splits v with the key set's split vector and applies the eight key parts:
/// parts 1-4 take v', parts 5-8 take v''. Fresh split randomness makes every
/// call produce a different ciphertext.
EncryptedIndex encrypt_index(std::span<const std::uint8_t> v, const UserKeySet& keys, Rng& rng);

}  // namespace ppride::knn
