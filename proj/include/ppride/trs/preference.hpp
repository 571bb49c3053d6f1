#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ppride/common/bytes.hpp"

namespace ppride::trs {

enum class PreferenceKind : std::uint8_t {
  MinC = 0,      // fewest cells, then fewest transfers
  MaxC = 1,      // at most cell_limit cells, then fewest transfers
  MinT = 2,      // fewest transfers, then fewest cells
  MaxT = 3,      // at most transfer_limit transfers, then fewest cells
  MinCT = 4,     // both minima at once
  MinTMaxC = 5,  // fewest transfers among routes within cell_limit
  MinCMaxT = 6,  // fewest cells among routes within transfer_limit
  MaxCT = 7,     // within both limits
};

struct Preference {
  PreferenceKind kind = PreferenceKind::MinC;
  std::uint32_t cell_limit = 0;
  std::uint32_t transfer_limit = 0;

  static Preference min_c() { return {PreferenceKind::MinC, 0, 0}; }
  static Preference max_c(std::uint32_t cells) { return {PreferenceKind::MaxC, cells, 0}; }
  static Preference min_t() { return {PreferenceKind::MinT, 0, 0}; }
  static Preference max_t(std::uint32_t transfers) { return {PreferenceKind::MaxT, 0, transfers}; }
  static Preference min_ct() { return {PreferenceKind::MinCT, 0, 0}; }
  static Preference min_t_max_c(std::uint32_t cells) { return {PreferenceKind::MinTMaxC, cells, 0}; }
  static Preference min_c_max_t(std::uint32_t transfers) { return {PreferenceKind::MinCMaxT, 0, transfers}; }
  static Preference max_ct(std::uint32_t cells, std::uint32_t transfers) {
    return {PreferenceKind::MaxCT, cells, transfers};
  }

  bool has_cell_limit() const;
  bool has_transfer_limit() const;

  /// Cell limits must be >= 1; a transfer limit of 0 (single driver) is allowed.
  void validate() const;

  /// "min_c", "max_c:8", "min_t", "max_t:1", "min_ct", "min_t+max_c:8",
  /// "min_c+max_t:1", "max_ct:8:1".
  std::string to_string() const;
  static Preference parse(std::string_view text);

  void serialize(ByteWriter& out) const;
  static Preference deserialize(ByteReader& in);

  bool operator==(const Preference&) const = default;
};

}  // namespace ppride::trs
