#pragma once

#include <cstddef>
#include <cstdint>

#include "ppride/bloom/cell.hpp"
#include "ppride/knn/params.hpp"

namespace ppride::trs {

/// Interval index floor(t * ell / 86400). Doubling ell splits every
/// interval in two, so matches at a fine resolution imply matches at the
/// coarser one.
std::size_t time_interval(std::uint32_t seconds, std::size_t ell);

/// [k id bits, MSB first] ++ [k complement bits] ++ [ell one-hot time bits].
/// Throws std::out_of_range when the id needs more than k bits or the
/// interval is >= ell.
BitVector encode_cell(bloom::CellId cell, std::size_t interval, const knn::SchemeParams& params);

}  // namespace ppride::trs
