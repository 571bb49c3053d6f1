#include "ppride/trs/shortest_paths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>

namespace ppride::trs {

ShortestPaths modified_dijkstra(const WeightedDigraph& g, const std::vector<std::size_t>& sources,
                                double tie_tolerance) {
  const std::size_t n = g.size();
  ShortestPaths sp;
  sp.dist.assign(n, kInfinity);
  sp.pred.assign(n, {});
  sp.source.assign(n, false);
  sp.tie_tolerance = tie_tolerance;

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto s : sources) {
    if (s >= n) throw std::out_of_range("source outside graph");
    if (sp.source[s]) continue;
    sp.source[s] = true;
    sp.dist[s] = 0;
    pq.emplace(0.0, s);
  }

  std::vector<bool> settled(n, false);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (settled[u]) continue;
    settled[u] = true;
    for (const auto& e : g.out[u]) {
      if (!(e.weight > 0)) throw std::invalid_argument("edge weights must be positive");
      const std::size_t v = e.to;
      if (sp.source[v]) continue;
      const double cand = sp.dist[u] + e.weight;
      if (cand < sp.dist[v] - tie_tolerance) {
        sp.dist[v] = cand;
        sp.pred[v].assign(1, u);
        pq.emplace(cand, v);
      } else if (std::abs(cand - sp.dist[v]) <= tie_tolerance) {
        if (std::find(sp.pred[v].begin(), sp.pred[v].end(), u) == sp.pred[v].end()) sp.pred[v].push_back(u);
      }
    }
  }
  return sp;
}

namespace {

struct Backtrack {
  const ShortestPaths& sp;
  std::size_t max_paths;
  PathSet& out;
  std::vector<std::size_t> stack;
  std::vector<bool> on_path;

  // returns false once the cap is hit
  bool walk(std::size_t v) {
    stack.push_back(v);
    on_path[v] = true;
    bool go_on = true;
    if (sp.source[v]) {
      if (out.paths.size() >= max_paths) {
        out.truncated = true;
        go_on = false;
      } else {
        out.paths.emplace_back(stack.rbegin(), stack.rend());
      }
    } else {
      for (auto u : sp.pred[v]) {
        if (on_path[u]) continue;
        if (!walk(u)) {
          go_on = false;
          break;
        }
      }
    }
    on_path[v] = false;
    stack.pop_back();
    return go_on;
  }
};

}  // namespace

PathSet enumerate_paths(const ShortestPaths& sp, const std::vector<std::size_t>& destinations,
                        std::size_t max_paths) {
  PathSet out;
  double best = kInfinity;
  for (auto d : destinations) best = std::min(best, sp.dist.at(d));
  if (best == kInfinity) return out;

  std::vector<std::size_t> targets;
  for (auto d : destinations) {
    if (sp.dist[d] <= best + sp.tie_tolerance && std::find(targets.begin(), targets.end(), d) == targets.end()) {
      targets.push_back(d);
    }
  }
  std::sort(targets.begin(), targets.end());

  Backtrack bt{sp, max_paths, out, {}, std::vector<bool>(sp.dist.size(), false)};
  for (auto d : targets) {
    if (!bt.walk(d)) break;
  }
  return out;
}

}  // namespace ppride::trs
