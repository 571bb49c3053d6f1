#include "ppride/bloom/time_slot.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ppride::bloom {

std::size_t time_slot(std::uint32_t seconds, std::size_t slots) {
  if (slots == 0) throw std::invalid_argument("slot count must be >= 1");
  if (seconds >= kSecondsPerDay) {
    throw std::out_of_range("time " + std::to_string(seconds) + "s is outside the day");
  }
  return static_cast<std::size_t>(static_cast<std::uint64_t>(seconds) * slots / kSecondsPerDay);
}

TimeSlotVector encode_time_slot(std::uint32_t seconds, std::size_t slots) {
  TimeSlotVector v{BitVector(slots, 0)};
  v.bits[time_slot(seconds, slots)] = 1;
  return v;
}

std::size_t TimeSlotVector::slot() const {
  return static_cast<std::size_t>(std::find(bits.begin(), bits.end(), 1) - bits.begin());
}

BitVector TimeSlotVector::padded(std::size_t width) const {
  if (width < bits.size()) {
    throw std::invalid_argument("cannot pad a " + std::to_string(bits.size()) +
                                "-slot vector to " + std::to_string(width));
  }
  BitVector out(width, 0);
  std::copy(bits.begin(), bits.end(), out.begin());
  return out;
}

}  // namespace ppride::bloom
