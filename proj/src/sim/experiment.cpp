#include "ppride/sim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "ppride/bloom/bloom_filter.hpp"
#include "ppride/bloom/time_slot.hpp"
#include "ppride/tos/client.hpp"
#include "ppride/tos/service.hpp"

namespace ppride::sim {

tos::AuthorityConfig ExperimentConfig::authority() const {
  tos::AuthorityConfig a;
  const auto s = bloom::sizing(max_items, fpp);
  a.params.m = m ? m : s.m;
  a.alpha = static_cast<std::uint32_t>(alpha ? alpha : (m ? bloom::alpha_for(m, max_items) : s.alpha));
  a.params.k = k ? k : knn::bits_for_cells(city.cell_count());
  a.params.ell = ell;
  a.max_items = static_cast<std::uint32_t>(max_items);
  a.params.validate(city.cell_count());
  a.validate();
  return a;
}

void ExperimentConfig::validate() const {
  workload.validate(city);
  if (key_pool == 0) throw std::invalid_argument("key_pool must be >= 1");
  if (fpp <= 0 || fpp >= 1) throw std::invalid_argument("fpp must be in (0, 1)");
  if (pickup_cells == 0) throw std::invalid_argument("pickup_cells must be >= 1");
  if (run_nrs && workload.route_len_max > max_items) {
    throw std::invalid_argument("NRS routes longer than the Bloom capacity max_items");
  }
  authority();
}

bool plaintext_supports(const OfferSpec& offer, const RequestSpec& request, nrs::RideCase ride_case,
                        std::size_t pickup_cells, std::size_t time_slots) {
  auto has = [](const std::vector<std::uint32_t>& set, std::uint32_t c) {
    return std::find(set.begin(), set.end(), c) != set.end();
  };
  if (bloom::time_slot(offer.depart(), time_slots) != bloom::time_slot(request.pickup.time, time_slots)) return false;
  if (!has(offer.pickup_area(pickup_cells), request.pickup.cell)) return false;
  const auto drop = offer.dropoff_area();
  for (auto c : offer.cases) {
    bool ok = false;
    switch (c) {
      case nrs::RideCase::MpMd: ok = has(drop, request.dropoff.cell); break;
      case nrs::RideCase::MpRd: ok = has(offer.cells(), request.dropoff.cell); break;
      case nrs::RideCase::MpEd: ok = drop.size() == 1 && has(request.route, drop.front()); break;
    }
    if (ok) return c == ride_case;
  }
  return false;
}

ExperimentResult run_scheme(const ExperimentConfig& config, const Workload& workload, knn::Scheme scheme) {
  const bool is_nrs = scheme == knn::Scheme::Nrs;
  auto acfg = config.authority();
  const auto pool = config.key_pool;
  const auto per_device = std::max(workload.offers.size(), workload.requests.size()) / pool + 1;
  acfg.tokens_per_bundle = std::max<std::size_t>(32, per_device);
  if (is_nrs) {
    for (const auto& o : workload.offers) {
      if (o.route.size() > config.max_items) throw std::invalid_argument("offer route exceeds max_items");
    }
    for (const auto& q : workload.requests) {
      if (q.route.size() > config.max_items) throw std::invalid_argument("request route exceeds max_items");
    }
  }

  tos::RideService service(acfg, config.seed, {config.p_max});
  tos::LoopbackTransport wire([&](const tos::Envelope& e) { return service.handle(e); });
  const auto driver_role = is_nrs ? knn::Role::DriverNrs : knn::Role::DriverTrs;
  const auto rider_role = is_nrs ? knn::Role::RiderNrs : knn::Role::RiderTrs;
  std::vector<std::unique_ptr<tos::RideClient>> drivers, riders;
  for (std::size_t i = 0; i < pool; ++i) {
    drivers.push_back(std::make_unique<tos::RideClient>(wire, driver_role, config.seed * 1000 + 2 * i));
    riders.push_back(std::make_unique<tos::RideClient>(wire, rider_role, config.seed * 1000 + 2 * i + 1));
    drivers.back()->register_user();
    riders.back()->register_user();
  }

  std::unordered_map<std::uint64_t, std::size_t> offer_index, request_index;
  std::uint64_t offer_bytes = 0, request_bytes = 0;
  for (std::size_t i = 0; i < workload.offers.size(); ++i) {
    const auto& o = workload.offers[i];
    auto& d = *drivers[i % pool];
    const auto before = wire.bytes_sent();
    std::uint64_t id;
    if (is_nrs) {
      id = d.offer_nrs(o.pickup_area(config.pickup_cells), o.dropoff_area(), o.cells(), o.depart(), o.capacity,
                       o.cases);
    } else {
      std::vector<tos::Waypoint> route;
      for (const auto& s : o.route) route.push_back({s.cell, s.time});
      id = d.offer_trs(route, o.capacity);
    }
    offer_bytes += wire.bytes_sent() - before;
    offer_index[id] = i;
  }
  for (std::size_t i = 0; i < workload.requests.size(); ++i) {
    const auto& q = workload.requests[i];
    auto& r = *riders[i % pool];
    const auto before = wire.bytes_sent();
    const auto id = is_nrs ? r.request_nrs(q.pickup.cell, q.dropoff.cell, q.route, q.pickup.time)
                           : r.request_trs({q.pickup.cell, q.pickup.time}, {q.dropoff.cell, q.dropoff.time},
                                           q.preference);
    request_bytes += wire.bytes_sent() - before;
    request_index[id] = i;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto results = riders.front()->run_matching(scheme);
  const auto t1 = std::chrono::steady_clock::now();

  ExperimentResult out;
  auto& rep = out.report;
  rep.scheme = is_nrs ? "NRS" : "TRS";
  rep.seed = config.seed;
  rep.rows = workload.city.rows;
  rep.cols = workload.city.cols;
  rep.cell_count = workload.city.cell_count();
  rep.n_offers = workload.offers.size();
  rep.n_requests = workload.requests.size();
  rep.m = acfg.params.m;
  rep.alpha = acfg.alpha;
  rep.k = acfg.params.k;
  rep.ell = acfg.params.ell;
  rep.fpp = config.fpp;
  rep.search_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rep.bytes_per_offer = workload.offers.empty() ? 0 : double(offer_bytes) / double(workload.offers.size());
  rep.bytes_per_request = workload.requests.empty() ? 0 : double(request_bytes) / double(workload.requests.size());

  out.outcomes.resize(workload.requests.size());
  for (std::size_t i = 0; i < out.outcomes.size(); ++i) out.outcomes[i].request = i;
  std::vector<std::set<std::size_t>> served(workload.offers.size());
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_pref;  // matched, total
  for (const auto& q : workload.requests) ++by_pref[q.preference.to_string()].second;

  for (const auto& m : results) {
    auto& oc = out.outcomes.at(request_index.at(m.request_id));
    oc.matched = m.matched;
    if (!m.matched) continue;
    for (auto id : m.offer_ids) oc.offers.push_back(offer_index.at(id));
    oc.ride_case = m.ride_case;
    oc.cell_count = m.cell_count;
    oc.transfer_count = m.transfer_count;
    rep.truncated = rep.truncated || m.truncated;
    for (auto o : oc.offers) served[o].insert(oc.request);
    if (is_nrs && m.ride_case) {
      oc.fpp_event = !plaintext_supports(workload.offers[oc.offers.front()], workload.requests[oc.request],
                                         *m.ride_case, config.pickup_cells, acfg.time_slots);
    }
  }
  for (const auto& oc : out.outcomes) {
    if (!oc.matched) continue;
    rep.matched += 1;
    rep.transfers += oc.transfer_count;
    rep.fpp_events += oc.fpp_event ? 1 : 0;
    if (!is_nrs) ++by_pref[workload.requests[oc.request].preference.to_string()].first;
  }
  std::size_t seats = 0;
  for (const auto& s : served) seats += s.size();
  rep.vehicle_service_rate = served.empty() ? 0 : double(seats) / double(served.size());
  rep.success_rate = workload.requests.empty() ? 0 : rep.matched / double(workload.requests.size());
  if (!is_nrs) {
    for (const auto& [pref, counts] : by_pref) {
      rep.preference_success_rate[pref] = double(counts.first) / double(counts.second);
    }
  }
  return out;
}

std::vector<MetricsReport> run_experiment(const ExperimentConfig& config, const Workload& workload) {
  config.validate();
  std::vector<MetricsReport> out;
  if (config.run_nrs) out.push_back(run_scheme(config, workload, knn::Scheme::Nrs).report);
  if (config.run_trs) out.push_back(run_scheme(config, workload, knn::Scheme::Trs).report);
  return out;
}

std::vector<MetricsReport> run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, generate_workload(config.city, config.workload, config.seed));
}

std::uint64_t ccrs_size_model(std::uint64_t cell_count) {
  if (cell_count == 0) throw std::invalid_argument("cell_count must be >= 1");
  return 4 * 8 * cell_count * 8;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "requests") return SweepAxis::Requests;
  if (name == "offers") return SweepAxis::Offers;
  if (name == "cells") return SweepAxis::Cells;
  if (name == "ell") return SweepAxis::Ell;
  if (name == "fpp") return SweepAxis::Fpp;
  throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::vector<ExperimentConfig> sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values,
                                    const std::vector<std::uint64_t>& seeds) {
  std::vector<ExperimentConfig> out;
  for (double v : values) {
    if (v <= 0) throw std::invalid_argument("sweep values must be positive");
    for (auto seed : seeds) {
      auto c = base;
      c.seed = seed;
      switch (axis) {
        case SweepAxis::Requests: c.workload.n_requests = static_cast<std::size_t>(v); break;
        case SweepAxis::Offers: c.workload.n_offers = static_cast<std::size_t>(v); break;
        case SweepAxis::Cells: {
          const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(v)));
          c.city.rows = c.city.cols = std::max<std::uint32_t>(side, 2);
          c.k = 0;
          break;
        }
        case SweepAxis::Ell: c.ell = static_cast<std::size_t>(v); break;
        case SweepAxis::Fpp: c.fpp = v; c.m = 0; c.alpha = 0; break;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<MetricsReport> run_all(const std::vector<ExperimentConfig>& configs, std::size_t threads) {
  std::vector<std::vector<MetricsReport>> slots(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next++) < configs.size();) {
      try {
        slots[i] = run_experiment(configs[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::max<std::size_t>(threads, 1); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  std::vector<MetricsReport> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

namespace {

std::string point_key(const MetricsReport& r) {
  std::ostringstream k;
  k << r.scheme << '|' << r.rows << '|' << r.cols << '|' << r.n_offers << '|' << r.n_requests << '|' << r.m << '|'
    << r.alpha << '|' << r.k << '|' << r.ell << '|' << r.fpp;
  return k.str();
}

}  // namespace

std::vector<MetricsReport> mean_over_seeds(const std::vector<MetricsReport>& reports) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const MetricsReport*>> groups;
  for (const auto& r : reports) {
    auto key = point_key(r);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<MetricsReport> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    MetricsReport m = *g.front();
    m.seed = 0;
    const double n = static_cast<double>(g.size());
    auto mean = [&](auto field) {
      double s = 0;
      for (auto* r : g) s += r->*field;
      return s / n;
    };
    m.search_time_ms = mean(&MetricsReport::search_time_ms);
    m.bytes_per_offer = mean(&MetricsReport::bytes_per_offer);
    m.bytes_per_request = mean(&MetricsReport::bytes_per_request);
    m.vehicle_service_rate = mean(&MetricsReport::vehicle_service_rate);
    m.success_rate = mean(&MetricsReport::success_rate);
    m.fpp_events = mean(&MetricsReport::fpp_events);
    m.matched = mean(&MetricsReport::matched);
    m.transfers = mean(&MetricsReport::transfers);
    m.truncated = std::any_of(g.begin(), g.end(), [](auto* r) { return r->truncated; });
    std::map<std::string, std::pair<double, int>> prefs;
    for (auto* r : g) {
      for (const auto& [p, v] : r->preference_success_rate) {
        prefs[p].first += v;
        prefs[p].second += 1;
      }
    }
    m.preference_success_rate.clear();
    for (const auto& [p, acc] : prefs) m.preference_success_rate[p] = acc.first / acc.second;
    out.push_back(std::move(m));
  }
  return out;
}

std::string csv_header() {
  return "scheme,seed,rows,cols,cell_count,n_offers,n_requests,m,alpha,k,ell,fpp,search_time_ms,bytes_per_offer,"
         "bytes_per_request,vehicle_service_rate,success_rate,preference_success_rate,fpp_events,matched,transfers,"
         "truncated";
}

std::string csv_row(const MetricsReport& r) {
  std::ostringstream o;
  o << std::setprecision(10);
  std::string prefs;
  for (const auto& [p, v] : r.preference_success_rate) {
    if (!prefs.empty()) prefs += ';';
    std::ostringstream pv;
    pv << p << '=' << std::setprecision(6) << v;
    prefs += pv.str();
  }
  o << r.scheme << ',' << r.seed << ',' << r.rows << ',' << r.cols << ',' << r.cell_count << ',' << r.n_offers << ','
    << r.n_requests << ',' << r.m << ',' << r.alpha << ',' << r.k << ',' << r.ell << ',' << r.fpp << ','
    << r.search_time_ms << ',' << r.bytes_per_offer << ',' << r.bytes_per_request << ',' << r.vehicle_service_rate
    << ',' << r.success_rate << ',' << prefs << ',' << r.fpp_events << ',' << r.matched << ',' << r.transfers << ','
    << (r.truncated ? 1 : 0);
  return o.str();
}

void write_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
  out << csv_header() << '\n';
  for (const auto& r : reports) out << csv_row(r) << '\n';
}

}  // namespace ppride::sim
