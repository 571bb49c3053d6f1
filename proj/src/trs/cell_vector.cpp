#include "ppride/trs/cell_vector.hpp"

#include <stdexcept>
#include <string>

#include "ppride/bloom/time_slot.hpp"

namespace ppride::trs {

std::size_t time_interval(std::uint32_t seconds, std::size_t ell) {
  return bloom::time_slot(seconds, ell);
}

BitVector encode_cell(bloom::CellId cell, std::size_t interval, const knn::SchemeParams& params) {
  const std::size_t k = params.k;
  if (k < 32 && (static_cast<std::uint64_t>(cell.id) >> k) != 0) {
    throw std::out_of_range("cell id " + std::to_string(cell.id) + " needs more than " +
                            std::to_string(k) + " bits");
  }
  if (interval >= params.ell) {
    throw std::out_of_range("interval " + std::to_string(interval) + " >= ell=" + std::to_string(params.ell));
  }
  BitVector v(params.n(), 0);
  for (std::size_t b = 0; b < k; ++b) {
    const std::uint8_t bit = (cell.id >> (k - 1 - b)) & 1U;
    v[b] = bit;
    v[k + b] = bit ^ 1U;
  }
  v[2 * k + interval] = 1;
  return v;
}

}  // namespace ppride::trs
