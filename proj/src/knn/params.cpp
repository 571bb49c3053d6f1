#include "ppride/knn/params.hpp"

#include <string>

namespace ppride::knn {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::DriverNrs: return "driver-nrs";
    case Role::RiderNrs: return "rider-nrs";
    case Role::DriverTrs: return "driver-trs";
    case Role::RiderTrs: return "rider-trs";
  }
  return "unknown";
}

Role role_from_byte(std::uint8_t b) {
  if (b > static_cast<std::uint8_t>(Role::RiderTrs)) {
    throw std::invalid_argument("unknown role " + std::to_string(b));
  }
  return static_cast<Role>(b);
}

std::size_t bits_for_cells(std::size_t cell_count) {
  std::size_t k = 1;
  while ((std::size_t{1} << k) < cell_count) ++k;
  return k;
}

void SchemeParams::validate(std::size_t cell_count) const {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  if (k >= 32) throw std::invalid_argument("k must be < 32");
  if (cell_count > 0 && (std::size_t{1} << k) < cell_count) {
    throw std::invalid_argument("k=" + std::to_string(k) + " cannot address " +
                                std::to_string(cell_count) + " cells");
  }
  if (!(field.entry_bound > 0) || !(field.max_condition > 1) || field.max_retries < 1) {
    throw std::invalid_argument("invalid numeric field");
  }
}

}  // namespace ppride::knn
