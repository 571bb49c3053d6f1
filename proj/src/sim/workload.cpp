#include "ppride/sim/workload.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ppride::sim {

namespace {

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::uint32_t jitter(Rng& rng, std::uint32_t t, std::uint32_t amount) {
  if (amount == 0) return t;
  const auto d = std::uniform_int_distribution<long>(-static_cast<long>(amount), amount)(rng);
  return static_cast<std::uint32_t>(std::clamp<long>(static_cast<long>(t) + d, 0, 86399));
}

/// Self-avoiding walk of exactly `len` cells, restarted when it gets stuck.
std::vector<std::uint32_t> walk(const GridCity& city, Rng& rng, std::size_t len, std::int64_t start = -1) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<std::uint32_t> path{start >= 0 ? static_cast<std::uint32_t>(start)
                                               : static_cast<std::uint32_t>(uniform(rng, 0, city.cell_count() - 1))};
    std::vector<bool> seen(city.cell_count());
    seen[path[0]] = true;
    while (path.size() < len) {
      std::vector<std::uint32_t> next;
      for (auto n : city.neighbors(path.back())) {
        if (!seen[n]) next.push_back(n);
      }
      if (next.empty()) break;
      const auto c = next[uniform(rng, 0, next.size() - 1)];
      seen[c] = true;
      path.push_back(c);
    }
    if (path.size() == len) return path;
  }
  throw std::invalid_argument("could not realize a route of " + std::to_string(len) + " cells");
}

struct Crossing {
  std::size_t a, x, b, y;  // offer a at position x meets offer b at position y
};

std::string cases_text(const std::vector<nrs::RideCase>& cases) {
  std::string out;
  for (auto c : cases) {
    if (!out.empty()) out += ',';
    out += c == nrs::RideCase::MpMd ? "md" : c == nrs::RideCase::MpRd ? "rd" : "ed";
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::uint32_t to_u32(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoul(s, &used);
  if (used != s.size() || v > 0xffffffffUL) throw std::invalid_argument("bad number '" + s + "'");
  return static_cast<std::uint32_t>(v);
}

Stop parse_stop(const std::string& s) {
  const auto at = s.find('@');
  if (at == std::string::npos) throw std::invalid_argument("expected cell@time, got '" + s + "'");
  return {to_u32(s.substr(0, at)), to_u32(s.substr(at + 1))};
}

}  // namespace

std::vector<std::uint32_t> OfferSpec::pickup_area(std::size_t pickup_cells) const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < route.size() && i < pickup_cells; ++i) out.push_back(route[i].cell);
  return out;
}

std::vector<std::uint32_t> OfferSpec::dropoff_area() const { return {route.back().cell}; }

std::vector<std::uint32_t> OfferSpec::cells() const {
  std::vector<std::uint32_t> out;
  for (const auto& s : route) out.push_back(s.cell);
  return out;
}

void WorkloadParams::validate(const GridCity& city) const {
  city.validate();
  if (route_len_min < 2 || route_len_min > route_len_max) {
    throw std::invalid_argument("route lengths must satisfy 2 <= min <= max");
  }
  if (route_len_max > city.diameter()) {
    throw std::invalid_argument("route length " + std::to_string(route_len_max) + " exceeds the city diameter " +
                                std::to_string(city.diameter()));
  }
  if (depart_from > depart_to || depart_to + route_len_max * seconds_per_cell >= 86400) {
    throw std::invalid_argument("trips must start and end within one day");
  }
  if (capacity == 0) throw std::invalid_argument("capacity must be >= 1");
  if (cases.empty()) throw std::invalid_argument("offers need at least one case");
  if (hit_rate < 0 || hit_rate > 1 || transfer_share < 0 || transfer_share > 1) {
    throw std::invalid_argument("rates must be in [0, 1]");
  }
  if (preferences.empty()) throw std::invalid_argument("at least one preference is needed");
  for (const auto& p : preferences) p.validate();
  if (hit_rate > 0 && n_offers == 0) throw std::invalid_argument("on-route requests need offers");
}

Workload generate_workload(const GridCity& city, const WorkloadParams& p, std::uint64_t seed) {
  p.validate(city);
  Rng rng(seed);
  Workload w;
  w.city = city;
  w.seed = seed;

  for (std::size_t i = 0; i < p.n_offers; ++i) {
    const auto cells = walk(city, rng, uniform(rng, p.route_len_min, p.route_len_max));
    const auto depart = static_cast<std::uint32_t>(uniform(rng, p.depart_from, p.depart_to));
    OfferSpec o;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      o.route.push_back({cells[j], depart + static_cast<std::uint32_t>(j) * p.seconds_per_cell});
    }
    o.capacity = p.capacity;
    o.cases = p.cases;
    w.offers.push_back(std::move(o));
  }

  // last usable pick-up position when the ride leaves the route at `last`
  auto pickup_hi = [&](std::size_t last) {
    return p.pickup_window ? std::min(last - 1, p.pickup_window - 1) : last - 1;
  };

  for (std::size_t r = 0; r < p.n_requests; ++r) {
    RequestSpec q;
    q.preference = p.preferences[uniform(rng, 0, p.preferences.size() - 1)];
    const bool hit = std::uniform_real_distribution<double>(0, 1)(rng) < p.hit_rate;
    const bool change = hit && std::uniform_real_distribution<double>(0, 1)(rng) < p.transfer_share;
    if (!hit) {
      const auto cells = walk(city, rng, uniform(rng, p.route_len_min, p.route_len_max));
      // half a day away from every offer, so it can never pass a time gate
      auto t = static_cast<std::uint32_t>(uniform(rng, p.depart_from, p.depart_to));
      t = t < 43200 ? t + 43200 : t - 43200;
      q.pickup = {cells.front(), t};
      q.dropoff = {cells.back(), std::min<std::uint32_t>(
                                     t + static_cast<std::uint32_t>(cells.size() - 1) * p.seconds_per_cell, 86399)};
      q.route = cells;
      w.requests.push_back(std::move(q));
      continue;
    }
    const auto a = uniform(rng, 0, w.offers.size() - 1);
    const auto& A = w.offers[a].route;
    std::vector<Crossing> crossings;
    if (change) {
      for (std::size_t b = 0; b < w.offers.size(); ++b) {
        if (b == a) continue;
        const auto& B = w.offers[b].route;
        for (std::size_t x = 1; x < A.size(); ++x) {
          for (std::size_t y = 0; y + 1 < B.size(); ++y) {
            if (A[x].cell == B[y].cell) crossings.push_back({a, x, b, y});
          }
        }
      }
    }
    if (!crossings.empty()) {
      const auto c = crossings[uniform(rng, 0, crossings.size() - 1)];
      const auto& B = w.offers[c.b].route;
      const auto i = uniform(rng, 0, pickup_hi(c.x));
      const auto j = p.dropoff_at_destination ? B.size() - 1 : uniform(rng, c.y + 1, B.size() - 1);
      q.pickup = {A[i].cell, jitter(rng, A[i].time, p.time_jitter)};
      q.dropoff = {B[j].cell, jitter(rng, B[j].time, p.time_jitter)};
      for (std::size_t k = i; k <= c.x; ++k) q.route.push_back(A[k].cell);
      for (std::size_t k = c.y + 1; k <= j; ++k) q.route.push_back(B[k].cell);
    } else {
      const auto i = uniform(rng, 0, pickup_hi(A.size() - 1));
      const auto j = p.dropoff_at_destination ? A.size() - 1 : uniform(rng, i + 1, A.size() - 1);
      q.pickup = {A[i].cell, jitter(rng, A[i].time, p.time_jitter)};
      q.dropoff = {A[j].cell, jitter(rng, A[j].time, p.time_jitter)};
      for (std::size_t k = i; k <= j; ++k) q.route.push_back(A[k].cell);
    }
    w.requests.push_back(std::move(q));
  }
  return w;
}

void write_workload(std::ostream& out, const Workload& w) {
  out << "city " << w.city.rows << ' ' << w.city.cols << ' ' << w.city.cell_side_m << '\n';
  out << "seed " << w.seed << '\n';
  for (const auto& o : w.offers) {
    out << "offer " << o.capacity << ' ' << cases_text(o.cases);
    for (const auto& s : o.route) out << ' ' << s.cell << '@' << s.time;
    out << '\n';
  }
  for (const auto& q : w.requests) {
    out << "request " << q.preference.to_string() << ' ' << q.pickup.cell << '@' << q.pickup.time << ' '
        << q.dropoff.cell << '@' << q.dropoff.time << ' ';
    for (std::size_t i = 0; i < q.route.size(); ++i) out << (i ? "," : "") << q.route[i];
    out << '\n';
  }
}

Workload read_workload(std::istream& in) {
  Workload w;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string t; ls >> t;) f.push_back(t);
    if (f.empty()) continue;
    try {
      if (f[0] == "city" && f.size() == 4) {
        w.city = {to_u32(f[1]), to_u32(f[2]), std::stod(f[3])};
        w.city.validate();
      } else if (f[0] == "seed" && f.size() == 2) {
        w.seed = std::stoull(f[1]);
      } else if (f[0] == "offer" && f.size() >= 5) {
        OfferSpec o;
        o.capacity = to_u32(f[1]);
        for (const auto& c : split(f[2], ',')) {
          if (c == "md") o.cases.push_back(nrs::RideCase::MpMd);
          else if (c == "rd") o.cases.push_back(nrs::RideCase::MpRd);
          else if (c == "ed") o.cases.push_back(nrs::RideCase::MpEd);
          else throw std::invalid_argument("unknown case '" + c + "'");
        }
        for (std::size_t i = 3; i < f.size(); ++i) o.route.push_back(parse_stop(f[i]));
        w.offers.push_back(std::move(o));
      } else if (f[0] == "request" && f.size() == 5) {
        RequestSpec q;
        q.preference = trs::Preference::parse(f[1]);
        q.pickup = parse_stop(f[2]);
        q.dropoff = parse_stop(f[3]);
        for (const auto& c : split(f[4], ',')) q.route.push_back(to_u32(c));
        w.requests.push_back(std::move(q));
      } else {
        throw std::invalid_argument("unrecognized record");
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("workload line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& o : w.offers) {
    for (std::size_t i = 0; i < o.route.size(); ++i) {
      if (o.route[i].cell >= w.city.cell_count() ||
          (i > 0 && !w.city.adjacent(o.route[i - 1].cell, o.route[i].cell))) {
        throw std::invalid_argument("offer route is not a connected path inside the city");
      }
    }
  }
  for (const auto& q : w.requests) {
    if (q.pickup.cell >= w.city.cell_count() || q.dropoff.cell >= w.city.cell_count()) {
      throw std::invalid_argument("request outside the city");
    }
  }
  return w;
}

void save_workload(const std::string& path, const Workload& w) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  write_workload(out, w);
}

Workload load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_workload(in);
}

}  // namespace ppride::sim
