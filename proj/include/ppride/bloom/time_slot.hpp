#pragma once

#include <cstddef>
#include <cstdint>

#include "ppride/bloom/cell.hpp"
#include "ppride/knn/params.hpp"

namespace ppride::bloom {

inline constexpr std::uint32_t kSecondsPerDay = 86400;
inline constexpr std::size_t kNrsTimeSlots = 48;

/// Slot index floor(t * slots / 86400). Throws std::out_of_range for t
/// outside [0, 86400) and std::invalid_argument for slots == 0.
std::size_t time_slot(std::uint32_t seconds, std::size_t slots);

/// One-hot day vector.
struct TimeSlotVector {
  BitVector bits;

  std::size_t slot() const;
  /// Zero-padded copy of length `width` (>= bits.size()).
  BitVector padded(std::size_t width) const;
};

TimeSlotVector encode_time_slot(std::uint32_t seconds, std::size_t slots);

}  // namespace ppride::bloom
