#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppride/trs/offer.hpp"

namespace ppride::trs {

struct NodeId {
  std::uint64_t offer_id = 0;
  std::uint32_t position = 0;

  auto operator<=>(const NodeId&) const = default;
};

enum class EdgeKind : std::uint8_t { Route, Transfer };

struct Arc {
  std::size_t to;
  EdgeKind kind;
};

/// Drivers' cells as nodes. Route arcs run forward along one offer; a
/// transfer edge (stored as two arcs) joins cells of different offers whose
/// encrypted vectors score k+1, i.e. same cell in the same interval.
class TransferGraph {
 public:
  explicit TransferGraph(std::size_t k);

  std::size_t k() const { return k_; }

  /// Adds an unmasked offer and every transfer edge it creates with the
  /// offers already present. Throws std::invalid_argument on a duplicate
  /// id, a masked index or a dimension mismatch.
  void add_offer(const TrsOffer& offer);

  /// Topology-only insertion: `cells` nodes joined by route arcs and no
  /// ciphertexts. Such nodes never match a request endpoint.
  void add_route(std::uint64_t offer_id, std::size_t cells, std::uint32_t capacity);
  void add_transfer(NodeId a, NodeId b);

  std::size_t node_count() const { return nodes_.size(); }
  const NodeId& node(std::size_t i) const { return nodes_.at(i); }
  const TrsCell* cell(std::size_t i) const;
  const std::vector<Arc>& arcs(std::size_t i) const { return adj_.at(i); }
  std::optional<std::size_t> find(NodeId id) const;

  std::size_t arc_count() const;
  std::size_t route_edge_count() const;
  std::size_t transfer_edge_count() const;
  /// Undirected, each pair (a, b) with a < b, sorted.
  std::vector<std::pair<NodeId, NodeId>> transfer_edges() const;
  std::vector<std::pair<NodeId, NodeId>> route_edges() const;

  bool has_offer(std::uint64_t offer_id) const { return offers_.count(offer_id) != 0; }
  bool offer_active(std::uint64_t offer_id) const;
  std::uint32_t remaining_capacity(std::uint64_t offer_id) const;
  std::vector<std::uint64_t> offer_ids() const;

  /// One served request: decrements the offer's capacity and, once it hits
  /// zero, removes every edge touching the offer's nodes.
  /// Throws std::invalid_argument for an unknown offer.
  void consume(std::uint64_t offer_id);

  /// Adjacency list, one node per line: "offer:pos -> R offer:pos T offer:pos".
  std::string export_text() const;

 private:
  struct OfferState {
    std::size_t first = 0;
    std::size_t count = 0;
    std::uint32_t remaining = 0;
  };

  std::size_t add_nodes(std::uint64_t offer_id, std::size_t cells, std::uint32_t capacity);
  void link_transfer(std::size_t a, std::size_t b);

  std::size_t k_;
  std::size_t dim_ = 0;
  std::vector<NodeId> nodes_;
  std::vector<std::optional<TrsCell>> cells_;
  std::vector<std::vector<Arc>> adj_;
  std::map<std::uint64_t, OfferState> offers_;
};

}  // namespace ppride::trs
