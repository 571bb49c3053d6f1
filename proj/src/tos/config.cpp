#include "ppride/tos/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ppride/bloom/bloom_filter.hpp"

namespace ppride::tos {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw std::invalid_argument("bad number '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("bad boolean '" + v + "'");
}

}  // namespace

AuthorityConfig ServiceConfig::authority() const {
  AuthorityConfig a;
  a.params.k = k;
  a.params.ell = ell;
  a.params.m = m;
  a.max_items = static_cast<std::uint32_t>(max_items);
  if (m == 0) {
    const auto s = bloom::sizing(max_items, fpp);
    a.params.m = s.m;
    a.alpha = static_cast<std::uint32_t>(alpha ? alpha : s.alpha);
  } else {
    a.alpha = static_cast<std::uint32_t>(alpha ? alpha : bloom::alpha_for(m, max_items));
  }
  a.tokens_per_bundle = tokens;
  a.rotate_keys = rotate_keys;
  a.validate();
  return a;
}

ServiceConfig parse_config(std::istream& in) {
  ServiceConfig c;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    try {
      if (key == "bind") c.bind = val;
      else if (key == "port") c.port = parse_number<std::uint16_t>(val);
      else if (key == "epoch_period") c.epoch_period = parse_number<std::uint32_t>(val);
      else if (key == "m") c.m = parse_number<std::size_t>(val);
      else if (key == "k") c.k = parse_number<std::size_t>(val);
      else if (key == "ell") c.ell = parse_number<std::size_t>(val);
      else if (key == "alpha") c.alpha = parse_number<std::size_t>(val);
      else if (key == "max_items") c.max_items = parse_number<std::size_t>(val);
      else if (key == "fpp") c.fpp = parse_number<double>(val);
      else if (key == "capacity") c.capacity = parse_number<std::uint32_t>(val);
      else if (key == "p_max") c.p_max = parse_number<std::size_t>(val);
      else if (key == "tokens") c.tokens = parse_number<std::size_t>(val);
      else if (key == "rotate_keys") c.rotate_keys = parse_bool(val);
      else if (key == "seed") c.seed = parse_number<std::uint64_t>(val);
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (c.fpp <= 0 || c.fpp >= 1) throw std::invalid_argument("fpp must be in (0, 1)");
  if (c.capacity == 0) throw std::invalid_argument("capacity must be >= 1");
  if (c.p_max == 0) throw std::invalid_argument("p_max must be >= 1");
  return c;
}

ServiceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  return parse_config(in);
}

void write_config(std::ostream& out, const ServiceConfig& c) {
  out << "bind=" << c.bind << "\nport=" << c.port << "\nepoch_period=" << c.epoch_period << "\nm=" << c.m
      << "\nk=" << c.k << "\nell=" << c.ell << "\nalpha=" << c.alpha << "\nmax_items=" << c.max_items
      << "\nfpp=" << c.fpp << "\ncapacity=" << c.capacity << "\np_max=" << c.p_max << "\ntokens=" << c.tokens
      << "\nrotate_keys=" << (c.rotate_keys ? "true" : "false") << "\nseed=" << c.seed << "\n";
}

}  // namespace ppride::tos
