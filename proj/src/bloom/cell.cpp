#include "ppride/bloom/cell.hpp"

#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace ppride::bloom {

EpochCodebook::EpochCodebook(EpochKey key, std::size_t k) : key_(key), k_(k) {
  if (k < 1 || k > 24) throw std::invalid_argument("codebook needs 1 <= k <= 24");
  permutation_.resize(std::size_t{1} << k);
  std::iota(permutation_.begin(), permutation_.end(), 0U);
  std::seed_seq seq{static_cast<std::uint32_t>(key.epoch), static_cast<std::uint32_t>(key.epoch >> 32),
                    static_cast<std::uint32_t>(key.salt), static_cast<std::uint32_t>(key.salt >> 32)};
  std::mt19937_64 rng(seq);
  // Fisher-Yates with explicit draws so the table is independent of the std::shuffle impl.
  for (std::size_t i = permutation_.size() - 1; i > 0; --i) {
    const std::size_t j = rng() % (i + 1);
    std::swap(permutation_[i], permutation_[j]);
  }
}

CellId EpochCodebook::cell(std::uint32_t physical) const {
  if (physical >= permutation_.size()) {
    throw std::out_of_range("cell " + std::to_string(physical) + " exceeds " +
                            std::to_string(k_) + "-bit identifier space");
  }
  return CellId{permutation_[physical], key_.epoch};
}

}  // namespace ppride::bloom
