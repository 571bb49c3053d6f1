#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ppride/trs/graph.hpp"
#include "ppride/trs/preference.hpp"
#include "ppride/trs/shortest_paths.hpp"

namespace ppride::trs {

/// Which count costs one unit; the other costs epsilon.
enum class Weighting : std::uint8_t { Cells, Transfers };

struct WeightedGraph {
  WeightedDigraph digraph;
  double epsilon = 0;
  /// 1/2 when the epsilon arcs form no cycle, so every path with the same
  /// unit count ties; otherwise exact and epsilon breaks ties.
  double tie_tolerance = kExactTies;
};

/// epsilon = 1 / (4 (|arcs| + 1)): any simple path's epsilon sum stays below 1/2.
double epsilon_for(std::size_t arc_count);

WeightedGraph assign_weights(const TransferGraph& graph, Weighting weighting);

struct PathResult {
  std::vector<NodeId> nodes;
  std::size_t cell_count = 0;      // route edges + 1
  std::size_t transfer_count = 0;  // cross-offer hops
  std::vector<std::uint64_t> offers;  // in traversal order
  bool truncated = false;

  bool operator==(const PathResult&) const = default;
};

PathResult annotate(const TransferGraph& graph, const std::vector<std::size_t>& path);

/// All shortest paths between the node sets under one weighting.
std::vector<PathResult> all_shortest(const TransferGraph& graph, Weighting weighting,
                                     const std::vector<std::size_t>& sources,
                                     const std::vector<std::size_t>& destinations,
                                     std::size_t max_paths, bool* truncated = nullptr);

/// Applies the preference to the candidate sets and returns its single
/// answer. Deterministic: ties fall to the lexicographically smallest node
/// sequence.
std::optional<PathResult> select_path(const TransferGraph& graph, const Preference& preference,
                                      const std::vector<std::size_t>& sources,
                                      const std::vector<std::size_t>& destinations,
                                      std::size_t max_paths = kDefaultMaxPaths);

struct Endpoints {
  std::vector<std::size_t> sources;
  std::vector<std::size_t> destinations;
};

/// Nodes of active offers whose `plus` index scores k+1 against the
/// request's pick-up (sources) or drop-off (destinations). The request must
/// be unmasked.
Endpoints find_endpoints(const TransferGraph& graph, const TrsRequest& request);

std::optional<PathResult> search(const TransferGraph& graph, const TrsRequest& request,
                                 std::size_t max_paths = kDefaultMaxPaths);

struct ServedRequest {
  std::uint64_t request_id = 0;
  PathResult path;
};

/// Consumes one seat on every distinct offer each served path used.
void update_graph(TransferGraph& graph, const std::vector<ServedRequest>& served);

}  // namespace ppride::trs
