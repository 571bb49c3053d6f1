#pragma once

// Plaintext location data. Never included by organizing-server code.
#define PPRIDE_PLAINTEXT_LOCATION 1

#include <compare>
#include <cstdint>
#include <vector>

namespace ppride::bloom {

/// Identifier-rotation period plus the per-period hash salt.
struct EpochKey {
  std::uint64_t epoch = 0;
  std::uint64_t salt = 0;

  auto operator<=>(const EpochKey&) const = default;
};

/// A cell identifier as valid during one epoch.
struct CellId {
  std::uint32_t id = 0;
  std::uint64_t epoch = 0;

  auto operator<=>(const CellId&) const = default;
};

/// Maps physical cells to their identifiers for one epoch through a seeded
/// permutation of [0, 2^k). Identifiers from different epochs are unrelated.
class EpochCodebook {
 public:
  EpochCodebook(EpochKey key, std::size_t k);

  CellId cell(std::uint32_t physical) const;
  const EpochKey& key() const { return key_; }
  std::size_t bits() const { return k_; }

 private:
  EpochKey key_;
  std::size_t k_;
  std::vector<std::uint32_t> permutation_;
};

}  // namespace ppride::bloom
