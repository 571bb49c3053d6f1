#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace ppride::trs {

struct WeightedDigraph {
  struct Edge {
    std::size_t to;
    double weight;
  };

  explicit WeightedDigraph(std::size_t n = 0) : out(n) {}

  std::size_t size() const { return out.size(); }
  void add_arc(std::size_t from, std::size_t to, double weight) { out.at(from).push_back({to, weight}); }

  std::vector<std::vector<Edge>> out;
};

struct ShortestPaths {
  std::vector<double> dist;               // infinity when unreachable
  std::vector<std::vector<std::size_t>> pred;  // every equal-cost predecessor
  std::vector<bool> source;
  double tie_tolerance = 0;
};

inline constexpr double kExactTies = 1e-9;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dijkstra from every source at distance 0 that keeps all equal-cost
/// predecessors. A relaxation shorter by more than `tie_tolerance` replaces
/// pred[v]; one within the tolerance appends to it. Sources get no
/// predecessors. Weights must be positive.
ShortestPaths modified_dijkstra(const WeightedDigraph& g, const std::vector<std::size_t>& sources,
                                double tie_tolerance = kExactTies);

struct PathSet {
  std::vector<std::vector<std::size_t>> paths;  // source first
  bool truncated = false;
};

inline constexpr std::size_t kDefaultMaxPaths = 10000;

/// Every source-to-destination node sequence in the predecessor DAG, over
/// the destinations whose distance is within the tie tolerance of the
/// nearest one. Stops after `max_paths` paths and sets `truncated`.
PathSet enumerate_paths(const ShortestPaths& sp, const std::vector<std::size_t>& destinations,
                        std::size_t max_paths = kDefaultMaxPaths);

}  // namespace ppride::trs
