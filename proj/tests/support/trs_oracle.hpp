#pragma once

// Plaintext transfer-graph construction over (cell id, interval) pairs.

#include <cstddef>
#include <cstdint>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

struct PlainRoute {
  std::uint64_t offer_id;
  std::vector<std::pair<std::uint32_t, std::size_t>> cells;  // (id, interval)
};

using Transfer = std::tuple<std::uint64_t, std::uint32_t, std::uint64_t, std::uint32_t>;

inline std::set<Transfer> plain_transfers(const std::vector<PlainRoute>& routes) {
  std::set<Transfer> out;
  for (std::size_t a = 0; a < routes.size(); ++a) {
    for (std::size_t b = a + 1; b < routes.size(); ++b) {
      for (std::uint32_t i = 0; i < routes[a].cells.size(); ++i) {
        for (std::uint32_t j = 0; j < routes[b].cells.size(); ++j) {
          if (routes[a].cells[i] != routes[b].cells[j]) continue;
          Transfer t{routes[a].offer_id, i, routes[b].offer_id, j};
          if (std::tie(routes[b].offer_id, j) < std::tie(routes[a].offer_id, i)) {
            t = Transfer{routes[b].offer_id, j, routes[a].offer_id, i};
          }
          out.insert(t);
        }
      }
    }
  }
  return out;
}

}  // namespace oracle
