#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppride/sim/workload.hpp"
#include "ppride/tos/authority.hpp"
#include "ppride/trs/shortest_paths.hpp"

namespace ppride::sim {

struct ExperimentConfig {
  GridCity city;
  WorkloadParams workload;
  std::uint64_t seed = 1;
  bool run_nrs = true;
  bool run_trs = true;
  std::size_t max_items = 60;  // Bloom sizing input
  double fpp = 0.01;
  std::size_t m = 0;      // 0: from the sizing formula
  std::size_t alpha = 0;  // 0: from the sizing formula
  std::size_t k = 0;      // 0: enough bits for every cell
  std::size_t ell = 25;
  std::size_t key_pool = 4;  // registered devices per role
  std::size_t p_max = trs::kDefaultMaxPaths;
  std::size_t pickup_cells = 3;  // NRS driver pick-up area

  /// Resolved authority settings. Throws std::invalid_argument.
  tos::AuthorityConfig authority() const;
  void validate() const;
};

/// What happened to one request.
struct RideOutcome {
  std::size_t request = 0;
  bool matched = false;
  std::vector<std::size_t> offers;  // workload offer indices, traversal order
  std::optional<nrs::RideCase> ride_case;
  std::uint32_t cell_count = 0;
  std::uint32_t transfer_count = 0;
  bool fpp_event = false;  // NRS: the plaintext trips do not support this match
};

struct MetricsReport {
  std::string scheme;
  // run parameters
  std::uint64_t seed = 0;
  std::uint32_t rows = 0, cols = 0, cell_count = 0;
  std::size_t n_offers = 0, n_requests = 0;
  std::size_t m = 0, alpha = 0, k = 0, ell = 0;
  double fpp = 0;
  // measurements
  double search_time_ms = 0;
  double bytes_per_offer = 0;
  double bytes_per_request = 0;
  double vehicle_service_rate = 0;  // distinct requests served per offer
  double success_rate = 0;          // matched / submitted requests
  std::map<std::string, double> preference_success_rate;  // TRS, per preference
  // counts; fractional after averaging over seeds
  double fpp_events = 0;
  double matched = 0;
  double transfers = 0;  // vehicle changes summed over matched rides
  bool truncated = false;
};

struct ExperimentResult {
  MetricsReport report;
  std::vector<RideOutcome> outcomes;  // one per request, in workload order
};

/// Full pipeline for one scheme: keygen, registration, submission over a
/// metering loopback, one matching round. Deterministic in (config,
/// workload) apart from search_time_ms.
ExperimentResult run_scheme(const ExperimentConfig& config, const Workload& workload, knn::Scheme scheme);

/// Generates the workload from the config and runs the enabled schemes.
std::vector<MetricsReport> run_experiment(const ExperimentConfig& config);
std::vector<MetricsReport> run_experiment(const ExperimentConfig& config, const Workload& workload);

/// Whether the plaintext trips support an NRS match with this case: the
/// same day slot, pick-up in the pick-up area and `ride_case` being the
/// first accepted case whose drop-off test holds.
bool plaintext_supports(const OfferSpec& offer, const RequestSpec& request, nrs::RideCase ride_case,
                        std::size_t pickup_cells = 3, std::size_t time_slots = 48);

/// Size of an offer when every cell of the city is a vector position: three
/// location vectors and a time vector, eight parts each, 8-byte elements.
std::uint64_t ccrs_size_model(std::uint64_t cell_count);

enum class SweepAxis { Requests, Offers, Cells, Ell, Fpp };

SweepAxis parse_axis(const std::string& name);

/// One config per (value, seed). Cells values are rounded to square cities.
std::vector<ExperimentConfig> sweep(const ExperimentConfig& base, SweepAxis axis,
                                    const std::vector<double>& values, const std::vector<std::uint64_t>& seeds);

/// Runs configs on up to `threads` workers; reports keep the input order.
std::vector<MetricsReport> run_all(const std::vector<ExperimentConfig>& configs, std::size_t threads = 1);

/// Averages reports that differ only in seed (seed is reported as 0).
std::vector<MetricsReport> mean_over_seeds(const std::vector<MetricsReport>& reports);

std::string csv_header();
std::string csv_row(const MetricsReport& r);
void write_csv(std::ostream& out, const std::vector<MetricsReport>& reports);

}  // namespace ppride::sim
