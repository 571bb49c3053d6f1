#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ppride/tos/authority.hpp"
#include "ppride/tos/organizer.hpp"

namespace ppride::tos {

/// Deployment settings read from a key=value text file. Blank lines and
/// lines starting with '#' are ignored. m and alpha of 0 are derived from
/// max_items and fpp.
struct ServiceConfig {
  std::string bind = "127.0.0.1";
  std::uint16_t port = 7400;
  std::uint32_t epoch_period = 0;  // seconds; 0 disables rotation
  std::size_t m = 0;
  std::size_t k = 11;
  std::size_t ell = 25;
  std::size_t alpha = 0;
  std::size_t max_items = 60;
  double fpp = 0.01;
  std::uint32_t capacity = 3;  // default seats per offer
  std::size_t p_max = trs::kDefaultMaxPaths;
  std::size_t tokens = 32;
  bool rotate_keys = false;
  std::uint64_t seed = 1;

  /// Fills m and alpha when unset and validates.
  AuthorityConfig authority() const;
  OrganizerConfig organizer() const { return {p_max}; }
};

/// Throws std::invalid_argument naming the line on unknown keys or bad values.
ServiceConfig parse_config(std::istream& in);
ServiceConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ServiceConfig& config);

}  // namespace ppride::tos
