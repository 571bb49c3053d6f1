#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ppride {

/// Injected randomness source. Every randomized operation takes one of these
/// by reference so runs are reproducible from a seed.
using Rng = std::mt19937_64;

/// Plaintext binary vector, one byte per bit (0 or 1).
using BitVector = std::vector<std::uint8_t>;

}  // namespace ppride

namespace ppride::knn {

enum class Scheme : std::uint8_t { Nrs = 0, Trs = 1 };

enum class Role : std::uint8_t { DriverNrs = 0, RiderNrs = 1, DriverTrs = 2, RiderTrs = 3 };

/// Column form is produced by driver-role keys, row form by rider-role keys.
enum class Orientation : std::uint8_t { Column = 0, Row = 1 };

constexpr Scheme scheme_of(Role r) {
  return (r == Role::DriverNrs || r == Role::RiderNrs) ? Scheme::Nrs : Scheme::Trs;
}
constexpr bool is_driver(Role r) { return r == Role::DriverNrs || r == Role::DriverTrs; }
constexpr Orientation orientation_of(Role r) {
  return is_driver(r) ? Orientation::Column : Orientation::Row;
}

std::string_view to_string(Role r);
Role role_from_byte(std::uint8_t b);

/// Element domain of every key matrix and split share.
struct NumericField {
  double entry_bound = 1.0;      // entries drawn uniform in [-entry_bound, entry_bound]
  double max_condition = 1e6;    // reject draws whose condition estimate exceeds this
  int max_retries = 8;
};

/// Vector lengths shared by both schemes.
struct SchemeParams {
  std::size_t m = 0;    // NRS vector length (Bloom filter bits)
  std::size_t k = 0;    // bits per cell identifier
  std::size_t ell = 0;  // TRS time-resolution bits
  NumericField field{};

  std::size_t n() const { return 2 * k + ell; }

  /// Throws std::invalid_argument when a size invariant fails. A nonzero
  /// cell_count additionally checks that k bits can address every cell.
  void validate(std::size_t cell_count = 0) const;
};

/// Smallest k with 2^k >= cell_count (at least 1).
std::size_t bits_for_cells(std::size_t cell_count);

/// Raised when no well-conditioned matrix was found within the retry budget.
class KeyGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppride::knn
