#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ppride::sim {

/// Rectangular city of square cells, numbered row-major from 0.
struct GridCity {
  std::uint32_t rows = 40;
  std::uint32_t cols = 40;
  double cell_side_m = 400;  // metadata only

  std::uint32_t cell_count() const { return rows * cols; }
  std::uint32_t cell(std::uint32_t r, std::uint32_t c) const { return r * cols + c; }
  std::uint32_t row(std::uint32_t cell) const { return cell / cols; }
  std::uint32_t col(std::uint32_t cell) const { return cell % cols; }
  /// Cells on the longest shortest 4-connected path, endpoints included.
  std::uint32_t diameter() const { return rows + cols - 1; }

  /// 4-connected neighbours in N, S, W, E order.
  std::vector<std::uint32_t> neighbors(std::uint32_t cell) const;
  bool adjacent(std::uint32_t a, std::uint32_t b) const;

  /// Throws std::invalid_argument below 4 cells.
  void validate() const;

  bool operator==(const GridCity&) const = default;
};

}  // namespace ppride::sim
