// Command-line front end: key generation, the ride service, workload
// submission and the evaluation sweeps.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ppride/sim/experiment.hpp"
#include "ppride/sim/workload.hpp"
#include "ppride/tos/client.hpp"
#include "ppride/tos/config.hpp"
#include "ppride/tos/service.hpp"
#include "ppride/tos/transport.hpp"

using namespace ppride;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

knn::Role parse_role(const std::string& s) {
  if (s == "driver-nrs") return knn::Role::DriverNrs;
  if (s == "rider-nrs") return knn::Role::RiderNrs;
  if (s == "driver-trs") return knn::Role::DriverTrs;
  if (s == "rider-trs") return knn::Role::RiderTrs;
  throw CLI::ValidationError("--role", "expected driver-nrs, rider-nrs, driver-trs or rider-trs");
}

knn::Scheme parse_scheme(const std::string& s) {
  if (s == "nrs") return knn::Scheme::Nrs;
  if (s == "trs") return knn::Scheme::Trs;
  throw CLI::ValidationError("--scheme", "expected nrs or trs");
}

tos::ServiceConfig service_config(const std::string& path, std::uint64_t seed, bool seed_set) {
  auto c = path.empty() ? tos::ServiceConfig{} : tos::load_config(path);
  if (seed_set) c.seed = seed;
  return c;
}

void print_match(std::ostream& out, const tos::MatchResult& m) {
  out << "request " << m.request_id << ": ";
  if (!m.matched) {
    out << "no match\n";
    return;
  }
  out << "offers";
  for (auto id : m.offer_ids) out << ' ' << id;
  if (m.ride_case) out << " case " << nrs::to_string(*m.ride_case);
  if (m.scheme == knn::Scheme::Trs) {
    out << " cells " << m.cell_count << " transfers " << m.transfer_count << " path";
    for (const auto& n : m.path) out << ' ' << n.offer_id << ':' << n.position;
    if (m.truncated) out << " (truncated)";
  }
  out << '\n';
}

struct ExperimentFlags {
  sim::ExperimentConfig config;
  std::string preferences = "min_c";
  std::string schemes = "both";

  void add(CLI::App* app) {
    auto& c = config;
    auto& w = c.workload;
    app->add_option("--rows", c.city.rows, "City rows")->capture_default_str();
    app->add_option("--cols", c.city.cols, "City columns")->capture_default_str();
    app->add_option("--offers", w.n_offers, "Number of offers")->capture_default_str();
    app->add_option("--requests", w.n_requests, "Number of requests")->capture_default_str();
    app->add_option("--route-min", w.route_len_min, "Shortest route in cells")->capture_default_str();
    app->add_option("--route-max", w.route_len_max, "Longest route in cells")->capture_default_str();
    app->add_option("--capacity", w.capacity, "Seats per offer")->capture_default_str();
    app->add_option("--hit-rate", w.hit_rate, "Share of requests placed on offer routes")->capture_default_str();
    app->add_option("--transfer-share", w.transfer_share, "Share of on-route requests needing a change")
        ->capture_default_str();
    app->add_option("--jitter", w.time_jitter, "Rider time noise in seconds")->capture_default_str();
    app->add_option("--pickup-window", w.pickup_window, "Pick-ups from the first N route cells (0 = any)")
        ->capture_default_str();
    app->add_flag("--dropoff-at-destination", w.dropoff_at_destination, "Riders leave at the driver's destination");
    app->add_option("--preferences", preferences, "Comma-separated TRS preferences, e.g. min_c,max_t:1")
        ->capture_default_str();
    app->add_option("--max-items", c.max_items, "Bloom capacity in cells")->capture_default_str();
    app->add_option("--fpp", c.fpp, "Bloom false-positive target")->capture_default_str();
    app->add_option("-m", c.m, "NRS vector length (0 = from sizing)")->capture_default_str();
    app->add_option("--alpha", c.alpha, "Bloom hash count (0 = from sizing)")->capture_default_str();
    app->add_option("-k", c.k, "Cell id bits (0 = enough for the city)")->capture_default_str();
    app->add_option("--ell", c.ell, "TRS time bits")->capture_default_str();
    app->add_option("--key-pool", c.key_pool, "Registered devices per role")->capture_default_str();
    app->add_option("--p-max", c.p_max, "Path enumeration cap")->capture_default_str();
    app->add_option("--scheme", schemes, "nrs, trs or both")->capture_default_str();
  }

  sim::ExperimentConfig resolve() {
    auto c = config;
    c.workload.preferences.clear();
    std::istringstream in(preferences);
    for (std::string p; std::getline(in, p, ',');) c.workload.preferences.push_back(trs::Preference::parse(p));
    if (schemes != "both" && schemes != "nrs" && schemes != "trs") {
      throw CLI::ValidationError("--scheme", "expected nrs, trs or both");
    }
    c.run_nrs = schemes != "trs";
    c.run_trs = schemes != "nrs";
    return c;
  }
};

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  for (std::string v; std::getline(in, v, ',');) out.push_back(std::stod(v));
  if (out.empty()) throw CLI::ValidationError("--values", "no values given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving ridesharing: keys, service, workloads and benchmarks"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Create an authority and write one user's key bundle");
  std::string kg_config, kg_role = "rider-nrs", kg_out;
  keygen->add_option("--config", kg_config, "Service config file");
  keygen->add_option("--role", kg_role, "driver-nrs, rider-nrs, driver-trs or rider-trs")->capture_default_str();
  keygen->add_option("--out", kg_out, "Bundle output file")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the authority and organizer on a TCP port");
  std::string sv_config;
  serve->add_option("--config", sv_config, "Service config file");

  // workload
  auto* workload = app.add_subcommand("workload", "Generate a workload file");
  ExperimentFlags wl_flags;
  std::string wl_out;
  wl_flags.add(workload);
  workload->add_option("--out", wl_out, "Workload output file")->required();

  // submit
  auto* submit = app.add_subcommand("submit", "Submit a workload's trips to a running service");
  std::string sb_host = "127.0.0.1", sb_file, sb_scheme = "trs";
  std::uint16_t sb_port = 7400;
  std::size_t sb_pool = 4;
  submit->add_option("--host", sb_host)->capture_default_str();
  submit->add_option("--port", sb_port)->capture_default_str();
  submit->add_option("--workload", sb_file, "Workload file")->required();
  submit->add_option("--scheme", sb_scheme, "nrs or trs")->capture_default_str();
  submit->add_option("--key-pool", sb_pool, "Devices per role")->capture_default_str();

  // match
  auto* match = app.add_subcommand("match", "Run one matching round on a running service");
  std::string mt_host = "127.0.0.1", mt_scheme = "trs";
  std::uint16_t mt_port = 7400;
  match->add_option("--host", mt_host)->capture_default_str();
  match->add_option("--port", mt_port)->capture_default_str();
  match->add_option("--scheme", mt_scheme, "nrs or trs")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Run experiments, optionally sweeping one parameter, as CSV");
  ExperimentFlags bn_flags;
  std::string bn_axis, bn_values, bn_out, bn_workload;
  std::size_t bn_seeds = 1, bn_threads = 1;
  bool bn_mean = false, bn_ccrs = false;
  bn_flags.add(bench);
  bench->add_option("--axis", bn_axis, "requests, offers, cells, ell or fpp");
  bench->add_option("--values", bn_values, "Comma-separated sweep values");
  bench->add_option("--seeds", bn_seeds, "Seeds per point, counting up from --seed")->capture_default_str();
  bench->add_option("--threads", bn_threads, "Parallel runs")->capture_default_str();
  bench->add_option("--workload", bn_workload, "Use this workload file instead of generating one");
  bench->add_option("--out", bn_out, "CSV output file (default stdout)");
  bench->add_flag("--mean", bn_mean, "Average over seeds");
  bench->add_flag("--ccrs", bn_ccrs, "Append the full-city vector size model per cell count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const bool seed_set = app.count("--seed") > 0;

  try {
    if (*keygen) {
      auto cfg = service_config(kg_config, seed, seed_set);
      const auto t0 = std::chrono::steady_clock::now();
      tos::TrustedAuthority ta(cfg.authority(), cfg.seed);
      const auto t1 = std::chrono::steady_clock::now();
      auto bundle = ta.register_user(parse_role(kg_role), ta.info().epoch);
      const auto t2 = std::chrono::steady_clock::now();
      ByteWriter w;
      bundle.serialize(w);
      std::ofstream out(kg_out, std::ios::binary);
      const auto& bytes = w.bytes();
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw std::runtime_error("cannot write " + kg_out);
      std::cout << "epoch " << bundle.info.epoch << " m " << bundle.info.m << " alpha " << bundle.info.alpha << " n "
                << bundle.info.n() << "\nmaster keys " << std::chrono::duration<double>(t1 - t0).count()
                << " s, user keys " << std::chrono::duration<double>(t2 - t1).count() << " s, " << bytes.size()
                << " bytes\n";
      return 0;
    }

    if (*serve) {
      auto cfg = service_config(sv_config, seed, seed_set);
      tos::RideService service(cfg.authority(), cfg.seed, cfg.organizer());
      tos::TcpServer server([&](const tos::Envelope& e) { return service.handle(e); }, cfg.bind, cfg.port);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const auto info = service.organizer().info();
      std::cout << "serving on " << cfg.bind << ':' << server.port() << " epoch " << info.epoch << " m " << info.m
                << " n " << info.n() << std::endl;
      auto next_rotation = std::chrono::steady_clock::now() + std::chrono::seconds(cfg.epoch_period);
      while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        if (cfg.epoch_period && std::chrono::steady_clock::now() >= next_rotation) {
          const auto e = service.rotate_epoch();
          std::cout << "epoch " << e.epoch << std::endl;
          next_rotation += std::chrono::seconds(cfg.epoch_period);
        }
      }
      server.stop();
      return 0;
    }

    if (*workload) {
      auto c = wl_flags.resolve();
      const auto w = sim::generate_workload(c.city, c.workload, seed);
      sim::save_workload(wl_out, w);
      std::cout << w.offers.size() << " offers, " << w.requests.size() << " requests -> " << wl_out << '\n';
      return 0;
    }

    if (*submit) {
      const auto scheme = parse_scheme(sb_scheme);
      const auto w = sim::load_workload(sb_file);
      if (sb_pool == 0) throw CLI::ValidationError("--key-pool", "must be >= 1");
      tos::TcpTransport t(sb_host, sb_port);
      const bool is_nrs = scheme == knn::Scheme::Nrs;
      std::vector<std::unique_ptr<tos::RideClient>> drivers, riders;
      for (std::size_t i = 0; i < sb_pool; ++i) {
        drivers.push_back(std::make_unique<tos::RideClient>(
            t, is_nrs ? knn::Role::DriverNrs : knn::Role::DriverTrs, seed * 1000 + 2 * i));
        riders.push_back(std::make_unique<tos::RideClient>(
            t, is_nrs ? knn::Role::RiderNrs : knn::Role::RiderTrs, seed * 1000 + 2 * i + 1));
      }
      for (std::size_t i = 0; i < w.offers.size(); ++i) {
        const auto& o = w.offers[i];
        auto& d = *drivers[i % sb_pool];
        std::uint64_t id;
        if (is_nrs) {
          id = d.offer_nrs(o.pickup_area(), o.dropoff_area(), o.cells(), o.depart(), o.capacity, o.cases);
        } else {
          std::vector<tos::Waypoint> route;
          for (const auto& s : o.route) route.push_back({s.cell, s.time});
          id = d.offer_trs(route, o.capacity);
        }
        std::cout << "offer " << i << " -> " << id << '\n';
      }
      for (std::size_t i = 0; i < w.requests.size(); ++i) {
        const auto& q = w.requests[i];
        auto& r = *riders[i % sb_pool];
        const auto id = is_nrs ? r.request_nrs(q.pickup.cell, q.dropoff.cell, q.route, q.pickup.time)
                               : r.request_trs({q.pickup.cell, q.pickup.time}, {q.dropoff.cell, q.dropoff.time},
                                               q.preference);
        std::cout << "request " << i << " -> " << id << '\n';
      }
      return 0;
    }

    if (*match) {
      tos::TcpTransport t(mt_host, mt_port);
      tos::RideClient operator_client(t, knn::Role::RiderTrs, seed);
      for (const auto& m : operator_client.run_matching(parse_scheme(mt_scheme))) print_match(std::cout, m);
      return 0;
    }

    if (*bench) {
      auto base = bn_flags.resolve();
      base.seed = seed;
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < std::max<std::size_t>(bn_seeds, 1); ++i) seeds.push_back(seed + i);
      std::vector<sim::MetricsReport> reports;
      if (!bn_workload.empty()) {
        const auto w = sim::load_workload(bn_workload);
        base.city = w.city;
        reports = sim::run_experiment(base, w);
      } else if (bn_axis.empty()) {
        std::vector<sim::ExperimentConfig> runs;
        for (auto s : seeds) {
          runs.push_back(base);
          runs.back().seed = s;
        }
        reports = sim::run_all(runs, bn_threads);
      } else {
        reports = sim::run_all(sim::sweep(base, sim::parse_axis(bn_axis), parse_values(bn_values), seeds), bn_threads);
      }
      if (bn_mean) reports = sim::mean_over_seeds(reports);

      std::ofstream file;
      if (!bn_out.empty()) {
        file.open(bn_out);
        if (!file) throw std::runtime_error("cannot write " + bn_out);
      }
      std::ostream& out = bn_out.empty() ? std::cout : file;
      sim::write_csv(out, reports);
      if (bn_ccrs) {
        out << "\ncell_count,ccrs_bytes_per_offer\n";
        std::set<std::uint32_t> cells;
        for (const auto& r : reports) cells.insert(r.cell_count);
        for (auto c : cells) out << c << ',' << sim::ccrs_size_model(c) << '\n';
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
