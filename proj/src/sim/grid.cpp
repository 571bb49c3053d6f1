#include "ppride/sim/grid.hpp"

#include <cstdlib>
#include <stdexcept>

namespace ppride::sim {

std::vector<std::uint32_t> GridCity::neighbors(std::uint32_t c) const {
  std::vector<std::uint32_t> out;
  const auto r = row(c), k = col(c);
  if (r > 0) out.push_back(cell(r - 1, k));
  if (r + 1 < rows) out.push_back(cell(r + 1, k));
  if (k > 0) out.push_back(cell(r, k - 1));
  if (k + 1 < cols) out.push_back(cell(r, k + 1));
  return out;
}

bool GridCity::adjacent(std::uint32_t a, std::uint32_t b) const {
  const auto dr = std::abs(static_cast<long>(row(a)) - static_cast<long>(row(b)));
  const auto dc = std::abs(static_cast<long>(col(a)) - static_cast<long>(col(b)));
  return dr + dc == 1;
}

void GridCity::validate() const {
  if (rows == 0 || cols == 0 || static_cast<std::uint64_t>(rows) * cols < 4) {
    throw std::invalid_argument("a city needs at least 4 cells");
  }
  if (static_cast<std::uint64_t>(rows) * cols > (std::uint64_t{1} << 24)) {
    throw std::invalid_argument("city larger than 2^24 cells");
  }
}

}  // namespace ppride::sim
