#include "ppride/trs/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ppride::trs {

TransferGraph::TransferGraph(std::size_t k) : k_(k) {}

std::size_t TransferGraph::add_nodes(std::uint64_t offer_id, std::size_t cells, std::uint32_t capacity) {
  if (offers_.count(offer_id)) throw std::invalid_argument("duplicate offer id " + std::to_string(offer_id));
  if (cells < 2) throw std::invalid_argument("a route needs at least 2 cells");
  if (capacity == 0) throw std::invalid_argument("offer capacity must be >= 1");
  const std::size_t first = nodes_.size();
  for (std::size_t p = 0; p < cells; ++p) {
    nodes_.push_back(NodeId{offer_id, static_cast<std::uint32_t>(p)});
    cells_.emplace_back();
    adj_.emplace_back();
    if (p > 0) adj_[first + p - 1].push_back(Arc{first + p, EdgeKind::Route});
  }
  offers_[offer_id] = OfferState{first, cells, capacity};
  return first;
}

void TransferGraph::link_transfer(std::size_t a, std::size_t b) {
  adj_[a].push_back(Arc{b, EdgeKind::Transfer});
  adj_[b].push_back(Arc{a, EdgeKind::Transfer});
}

void TransferGraph::add_offer(const TrsOffer& offer) {
  offer.validate();
  if (!offer.cells.front().plus.unmasked()) throw std::invalid_argument("offer must be unmasked before insertion");
  if (dim_ == 0) dim_ = offer.dim();
  if (offer.dim() != dim_) {
    throw std::invalid_argument("offer dimension " + std::to_string(offer.dim()) + " != graph dimension " +
                                std::to_string(dim_));
  }
  const std::size_t existing = nodes_.size();
  const std::size_t first = add_nodes(offer.offer_id, offer.cells.size(), offer.capacity);
  for (std::size_t p = 0; p < offer.cells.size(); ++p) cells_[first + p] = offer.cells[p];

  const double target = static_cast<double>(k_ + 1);
  for (std::size_t p = 0; p < offer.cells.size(); ++p) {
    const auto& minus = offer.cells[p].minus;
    for (std::size_t v = 0; v < existing; ++v) {
      if (!cells_[v] || !offer_active(nodes_[v].offer_id)) continue;
      if (knn::similarity_equals(knn::match_similarity(minus, cells_[v]->plus), target)) {
        link_transfer(first + p, v);
      }
    }
  }
}

void TransferGraph::add_route(std::uint64_t offer_id, std::size_t cells, std::uint32_t capacity) {
  add_nodes(offer_id, cells, capacity);
}

void TransferGraph::add_transfer(NodeId a, NodeId b) {
  if (a.offer_id == b.offer_id) throw std::invalid_argument("transfer edges join different offers");
  auto ia = find(a);
  auto ib = find(b);
  if (!ia || !ib) throw std::invalid_argument("transfer endpoint not in graph");
  link_transfer(*ia, *ib);
}

const TrsCell* TransferGraph::cell(std::size_t i) const {
  const auto& c = cells_.at(i);
  return c ? &*c : nullptr;
}

std::optional<std::size_t> TransferGraph::find(NodeId id) const {
  auto it = offers_.find(id.offer_id);
  if (it == offers_.end() || id.position >= it->second.count) return std::nullopt;
  return it->second.first + id.position;
}

std::size_t TransferGraph::arc_count() const {
  std::size_t n = 0;
  for (const auto& a : adj_) n += a.size();
  return n;
}

std::size_t TransferGraph::route_edge_count() const { return route_edges().size(); }

std::size_t TransferGraph::transfer_edge_count() const { return transfer_edges().size(); }

std::vector<std::pair<NodeId, NodeId>> TransferGraph::transfer_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    for (const auto& a : adj_[u]) {
      if (a.kind == EdgeKind::Transfer && nodes_[u] < nodes_[a.to]) out.emplace_back(nodes_[u], nodes_[a.to]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<NodeId, NodeId>> TransferGraph::route_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    for (const auto& a : adj_[u]) {
      if (a.kind == EdgeKind::Route) out.emplace_back(nodes_[u], nodes_[a.to]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool TransferGraph::offer_active(std::uint64_t offer_id) const { return remaining_capacity(offer_id) > 0; }

std::uint32_t TransferGraph::remaining_capacity(std::uint64_t offer_id) const {
  auto it = offers_.find(offer_id);
  if (it == offers_.end()) throw std::invalid_argument("unknown offer " + std::to_string(offer_id));
  return it->second.remaining;
}

std::vector<std::uint64_t> TransferGraph::offer_ids() const {
  std::vector<std::uint64_t> out;
  for (const auto& [id, st] : offers_) out.push_back(id);
  return out;
}

void TransferGraph::consume(std::uint64_t offer_id) {
  auto it = offers_.find(offer_id);
  if (it == offers_.end()) throw std::invalid_argument("unknown offer " + std::to_string(offer_id));
  auto& st = it->second;
  if (st.remaining == 0) throw std::logic_error("offer " + std::to_string(offer_id) + " has no seats left");
  if (--st.remaining > 0) return;

  const std::size_t lo = st.first;
  const std::size_t hi = st.first + st.count;
  auto inside = [&](std::size_t v) { return v >= lo && v < hi; };
  for (std::size_t u = lo; u < hi; ++u) {
    for (const auto& a : adj_[u]) {
      if (inside(a.to)) continue;
      auto& back = adj_[a.to];
      back.erase(std::remove_if(back.begin(), back.end(), [&](const Arc& x) { return x.to == u; }), back.end());
    }
    adj_[u].clear();
  }
}

std::string TransferGraph::export_text() const {
  std::ostringstream os;
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    os << nodes_[u].offer_id << ':' << nodes_[u].position << " ->";
    for (const auto& a : adj_[u]) {
      os << ' ' << (a.kind == EdgeKind::Route ? 'R' : 'T') << ' ' << nodes_[a.to].offer_id << ':'
         << nodes_[a.to].position;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace ppride::trs
