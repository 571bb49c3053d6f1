#include "ppride/trs/preference.hpp"

#include <charconv>
#include <stdexcept>
#include <vector>

namespace ppride::trs {

namespace {

struct KindName {
  PreferenceKind kind;
  std::string_view name;
  int limits;  // how many ":N" suffixes follow
};

constexpr KindName kNames[] = {
    {PreferenceKind::MinC, "min_c", 0},         {PreferenceKind::MaxC, "max_c", 1},
    {PreferenceKind::MinT, "min_t", 0},         {PreferenceKind::MaxT, "max_t", 1},
    {PreferenceKind::MinCT, "min_ct", 0},       {PreferenceKind::MinTMaxC, "min_t+max_c", 1},
    {PreferenceKind::MinCMaxT, "min_c+max_t", 1}, {PreferenceKind::MaxCT, "max_ct", 2},
};

std::uint32_t parse_limit(std::string_view s, std::string_view whole) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("bad preference limit in '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

bool Preference::has_cell_limit() const {
  return kind == PreferenceKind::MaxC || kind == PreferenceKind::MinTMaxC || kind == PreferenceKind::MaxCT;
}

bool Preference::has_transfer_limit() const {
  return kind == PreferenceKind::MaxT || kind == PreferenceKind::MinCMaxT || kind == PreferenceKind::MaxCT;
}

void Preference::validate() const {
  if (static_cast<std::uint8_t>(kind) > 7) throw std::invalid_argument("unknown preference kind");
  if (has_cell_limit() && cell_limit < 1) throw std::invalid_argument("cell limit must be >= 1");
}

std::string Preference::to_string() const {
  for (const auto& n : kNames) {
    if (n.kind != kind) continue;
    std::string s(n.name);
    if (has_cell_limit()) s += ":" + std::to_string(cell_limit);
    if (has_transfer_limit()) s += ":" + std::to_string(transfer_limit);
    return s;
  }
  return "?";
}

Preference Preference::parse(std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto colon = text.find(':', start);
    fields.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  for (const auto& n : kNames) {
    if (n.name != fields[0]) continue;
    if (static_cast<int>(fields.size()) != n.limits + 1) {
      throw std::invalid_argument("preference '" + std::string(text) + "' needs " +
                                  std::to_string(n.limits) + " limit(s)");
    }
    Preference p{n.kind, 0, 0};
    std::size_t next = 1;
    if (p.has_cell_limit()) p.cell_limit = parse_limit(fields[next++], text);
    if (p.has_transfer_limit()) p.transfer_limit = parse_limit(fields[next++], text);
    p.validate();
    return p;
  }
  throw std::invalid_argument("unknown preference '" + std::string(text) + "'");
}

void Preference::serialize(ByteWriter& out) const {
  out.put(static_cast<std::uint8_t>(kind));
  out.put(cell_limit);
  out.put(transfer_limit);
}

Preference Preference::deserialize(ByteReader& in) {
  Preference p;
  const auto k = in.get<std::uint8_t>();
  if (k > 7) throw DecodeError("unknown preference kind " + std::to_string(k));
  p.kind = static_cast<PreferenceKind>(k);
  p.cell_limit = in.get<std::uint32_t>();
  p.transfer_limit = in.get<std::uint32_t>();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
  return p;
}

}  // namespace ppride::trs
