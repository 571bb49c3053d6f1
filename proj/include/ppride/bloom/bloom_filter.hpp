#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ppride/bloom/cell.hpp"
#include "ppride/common/bytes.hpp"
#include "ppride/knn/params.hpp"

namespace ppride::bloom {

/// The alpha bit positions of one cell. Positions are pairwise distinct: a
/// hash that collides with an earlier position is recomputed with the
/// smallest counter that moves it elsewhere.
/// Throws std::invalid_argument when alpha > m.
std::vector<std::size_t> cell_positions(CellId cell, std::size_t m, std::size_t alpha,
                                        std::uint64_t salt);

class BloomFilter {
 public:
  BloomFilter(std::size_t m, std::size_t alpha, EpochKey key);

  std::size_t size() const { return m_; }
  std::size_t alpha() const { return alpha_; }
  const EpochKey& key() const { return key_; }

  /// Sets the cell's alpha positions. Throws std::invalid_argument when the
  /// cell's epoch differs from the filter's.
  void insert(CellId cell);
  bool test(std::size_t pos) const { return (words_[pos / 64] >> (pos % 64)) & 1U; }
  std::size_t popcount() const;

  /// Unpacked 0/1 vector of length m, the plaintext fed to encryption.
  BitVector bits() const;

  /// Plaintext inner product of the two filters' bit vectors.
  std::size_t dot(const BloomFilter& other) const;

  void serialize(ByteWriter& out) const;
  static BloomFilter deserialize(ByteReader& in);

  bool operator==(const BloomFilter&) const = default;

 private:
  void check_compatible(const BloomFilter& other) const;

  std::size_t m_;
  std::size_t alpha_;
  EpochKey key_;
  std::vector<std::uint64_t> words_;
};

/// Value-returning insert.
BloomFilter insert_cell(BloomFilter filter, CellId cell);

/// Builds a filter holding every cell in the list.
BloomFilter make_filter(std::size_t m, std::size_t alpha, EpochKey key,
                        const std::vector<CellId>& cells);

/// Dot product between the query cell's single-cell filter and `filter`.
/// Equals alpha for every inserted cell; below alpha means not inserted.
std::size_t membership_dot(CellId query, const BloomFilter& filter);

struct BloomSizing {
  std::size_t m;
  std::size_t alpha;
};

/// m = ceil(-n ln p / ln^2 2) rounded up to a multiple of 64,
/// alpha = ceil((m / n) ln 2).
BloomSizing sizing(std::size_t max_items, double target_fpp);

/// alpha = ceil((m / max_items) ln 2) for a fixed m.
std::size_t alpha_for(std::size_t m, std::size_t max_items);

/// (1 - e^{-alpha n / m})^alpha.
double analytic_fpp(std::size_t m, std::size_t alpha, std::size_t items);

}  // namespace ppride::bloom
