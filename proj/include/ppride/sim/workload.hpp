#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppride/nrs/nrs.hpp"
#include "ppride/sim/grid.hpp"
#include "ppride/trs/preference.hpp"

namespace ppride::sim {

struct Stop {
  std::uint32_t cell = 0;
  std::uint32_t time = 0;  // seconds since midnight

  bool operator==(const Stop&) const = default;
};

struct OfferSpec {
  std::vector<Stop> route;  // connected grid path in travel order
  std::uint32_t capacity = 1;
  std::vector<nrs::RideCase> cases;

  std::uint32_t depart() const { return route.front().time; }
  /// The first `pickup_cells` route cells.
  std::vector<std::uint32_t> pickup_area(std::size_t pickup_cells = 3) const;
  /// The destination cell.
  std::vector<std::uint32_t> dropoff_area() const;
  std::vector<std::uint32_t> cells() const;

  bool operator==(const OfferSpec&) const = default;
};

struct RequestSpec {
  Stop pickup;
  Stop dropoff;  // time is the expected arrival
  std::vector<std::uint32_t> route;  // the rider's own path, pickup to dropoff
  trs::Preference preference;

  bool operator==(const RequestSpec&) const = default;
};

struct Workload {
  GridCity city;
  std::uint64_t seed = 0;
  std::vector<OfferSpec> offers;
  std::vector<RequestSpec> requests;

  bool operator==(const Workload&) const = default;
};

struct WorkloadParams {
  std::size_t n_offers = 30;
  std::size_t n_requests = 30;
  std::size_t route_len_min = 8;
  std::size_t route_len_max = 20;
  std::uint32_t depart_from = 7 * 3600;
  std::uint32_t depart_to = 9 * 3600;
  std::uint32_t seconds_per_cell = 60;
  std::uint32_t capacity = 3;
  std::vector<nrs::RideCase> cases = nrs::kAllCases;
  /// Share of requests placed on offer routes; the rest are random trips
  /// twelve hours away from the departure window.
  double hit_rate = 0.8;
  /// Share of on-route requests that need a change of vehicle at a shared cell.
  double transfer_share = 0.3;
  /// Pick-ups come from the first `pickup_window` cells of the route; 0 means anywhere.
  std::size_t pickup_window = 0;
  /// Drop-off at the driver's destination instead of any later route cell.
  bool dropoff_at_destination = false;
  /// Rider times differ from the driver's passing time by up to this much.
  std::uint32_t time_jitter = 600;
  std::vector<trs::Preference> preferences{trs::Preference::min_c()};

  /// Throws std::invalid_argument for empty or out-of-range settings.
  void validate(const GridCity& city) const;
};

/// Deterministic in (city, params, seed). Routes are self-avoiding walks.
/// Throws std::invalid_argument when a route length cannot be realized.
Workload generate_workload(const GridCity& city, const WorkloadParams& params, std::uint64_t seed);

/// One trip per line:
///   city <rows> <cols> <side>
///   seed <seed>
///   offer <capacity> <cases> <cell>@<time> ...
///   request <preference> <cell>@<time> <cell>@<time> <route cells, comma separated>
/// Cases are a comma list of md, rd, ed.
void write_workload(std::ostream& out, const Workload& w);
Workload read_workload(std::istream& in);
void save_workload(const std::string& path, const Workload& w);
Workload load_workload(const std::string& path);

}  // namespace ppride::sim
