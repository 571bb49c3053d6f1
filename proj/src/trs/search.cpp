#include "ppride/trs/search.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

namespace ppride::trs {

double epsilon_for(std::size_t arc_count) { return 1.0 / (4.0 * (static_cast<double>(arc_count) + 1.0)); }

namespace {

bool unit_kind(EdgeKind kind, Weighting w) {
  return (kind == EdgeKind::Route) == (w == Weighting::Cells);
}

// Kahn's algorithm over the epsilon-weighted arcs only.
bool epsilon_arcs_acyclic(const TransferGraph& g, Weighting w) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& a : g.arcs(u)) {
      if (!unit_kind(a.kind, w)) ++indegree[a.to];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t u = 0; u < n; ++u) {
    if (indegree[u] == 0) ready.push_back(u);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const auto u = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& a : g.arcs(u)) {
      if (!unit_kind(a.kind, w) && --indegree[a.to] == 0) ready.push_back(a.to);
    }
  }
  return seen == n;
}


bool cells_first(const PathResult& a, const PathResult& b) {
  return std::tie(a.cell_count, a.transfer_count, a.nodes) < std::tie(b.cell_count, b.transfer_count, b.nodes);
}

bool transfers_first(const PathResult& a, const PathResult& b) {
  return std::tie(a.transfer_count, a.cell_count, a.nodes) < std::tie(b.transfer_count, b.cell_count, b.nodes);
}

}  // namespace

WeightedGraph assign_weights(const TransferGraph& graph, Weighting weighting) {
  WeightedGraph out;
  out.digraph = WeightedDigraph(graph.node_count());
  out.epsilon = epsilon_for(graph.arc_count());
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    for (const auto& a : graph.arcs(u)) {
      out.digraph.add_arc(u, a.to, unit_kind(a.kind, weighting) ? 1.0 : out.epsilon);
    }
  }
  out.tie_tolerance = epsilon_arcs_acyclic(graph, weighting) ? 0.5 : kExactTies;
  return out;
}

PathResult annotate(const TransferGraph& graph, const std::vector<std::size_t>& path) {
  PathResult r;
  if (path.empty()) return r;
  std::size_t route_edges = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const NodeId& id = graph.node(path[i]);
    r.nodes.push_back(id);
    if (r.offers.empty() || r.offers.back() != id.offer_id) r.offers.push_back(id.offer_id);
    if (i == 0) continue;
    if (graph.node(path[i - 1]).offer_id == id.offer_id) {
      ++route_edges;
    } else {
      ++r.transfer_count;
    }
  }
  r.cell_count = route_edges + 1;
  return r;
}

std::vector<PathResult> all_shortest(const TransferGraph& graph, Weighting weighting,
                                     const std::vector<std::size_t>& sources,
                                     const std::vector<std::size_t>& destinations, std::size_t max_paths,
                                     bool* truncated) {
  const auto wg = assign_weights(graph, weighting);
  const auto sp = modified_dijkstra(wg.digraph, sources, wg.tie_tolerance);
  const auto ps = enumerate_paths(sp, destinations, max_paths);
  if (truncated) *truncated = *truncated || ps.truncated;
  std::vector<PathResult> out;
  out.reserve(ps.paths.size());
  for (const auto& p : ps.paths) out.push_back(annotate(graph, p));
  return out;
}

std::optional<PathResult> select_path(const TransferGraph& graph, const Preference& preference,
                                      const std::vector<std::size_t>& sources,
                                      const std::vector<std::size_t>& destinations, std::size_t max_paths) {
  preference.validate();
  if (sources.empty() || destinations.empty()) return std::nullopt;

  using K = PreferenceKind;
  const K kind = preference.kind;
  const bool need_c = kind == K::MinC || kind == K::MaxC || kind == K::MinCT || kind == K::MinCMaxT || kind == K::MaxCT;
  const bool need_t = kind == K::MinT || kind == K::MaxT || kind == K::MinCT || kind == K::MinTMaxC || kind == K::MaxCT;

  bool truncated = false;
  std::vector<PathResult> sc, st;
  if (need_c) sc = all_shortest(graph, Weighting::Cells, sources, destinations, max_paths, &truncated);
  if (need_t) st = all_shortest(graph, Weighting::Transfers, sources, destinations, max_paths, &truncated);

  std::vector<PathResult> cand;
  switch (kind) {
    case K::MinC:
    case K::MaxC:
    case K::MinCMaxT: cand = sc; break;
    case K::MinT:
    case K::MaxT:
    case K::MinTMaxC: cand = st; break;
    case K::MinCT:
      for (const auto& a : sc) {
        if (std::any_of(st.begin(), st.end(), [&](const PathResult& b) { return b.nodes == a.nodes; })) {
          cand.push_back(a);
        }
      }
      break;
    case K::MaxCT: {
      cand = sc;
      for (const auto& b : st) {
        if (std::none_of(sc.begin(), sc.end(), [&](const PathResult& a) { return a.nodes == b.nodes; })) {
          cand.push_back(b);
        }
      }
      break;
    }
  }

  if (preference.has_cell_limit()) {
    std::erase_if(cand, [&](const PathResult& p) { return p.cell_count > preference.cell_limit; });
  }
  if (preference.has_transfer_limit()) {
    std::erase_if(cand, [&](const PathResult& p) { return p.transfer_count > preference.transfer_limit; });
  }
  if (cand.empty()) return std::nullopt;

  const bool by_transfers = kind == K::MaxC || kind == K::MinT || kind == K::MinTMaxC;
  auto best = std::min_element(cand.begin(), cand.end(), by_transfers ? transfers_first : cells_first);
  PathResult r = *best;
  r.truncated = truncated;
  return r;
}

Endpoints find_endpoints(const TransferGraph& graph, const TrsRequest& request) {
  if (!request.pickup.unmasked() || !request.dropoff.unmasked()) {
    throw std::invalid_argument("request must be unmasked before searching");
  }
  Endpoints e;
  const double target = static_cast<double>(graph.k() + 1);
  for (std::size_t u = 0; u < graph.node_count(); ++u) {
    const TrsCell* c = graph.cell(u);
    if (!c || !graph.offer_active(graph.node(u).offer_id)) continue;
    if (c->plus.dim() != request.dim()) throw std::invalid_argument("request dimension does not match the graph");
    if (knn::similarity_equals(knn::match_similarity(request.pickup, c->plus), target)) e.sources.push_back(u);
    if (knn::similarity_equals(knn::match_similarity(request.dropoff, c->plus), target)) e.destinations.push_back(u);
  }
  return e;
}

std::optional<PathResult> search(const TransferGraph& graph, const TrsRequest& request, std::size_t max_paths) {
  const auto e = find_endpoints(graph, request);
  return select_path(graph, request.preference, e.sources, e.destinations, max_paths);
}

void update_graph(TransferGraph& graph, const std::vector<ServedRequest>& served) {
  for (const auto& s : served) {
    for (auto id : s.path.offers) {
      if (!graph.has_offer(id)) throw std::invalid_argument("unknown offer " + std::to_string(id));
    }
  }
  for (const auto& s : served) {
    std::set<std::uint64_t> distinct(s.path.offers.begin(), s.path.offers.end());
    for (auto id : distinct) graph.consume(id);
  }
}

}  // namespace ppride::trs
