#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ppride/bloom/bloom_filter.hpp"
#include "ppride/bloom/cell.hpp"
#include "ppride/bloom/time_slot.hpp"
#include "ppride/knn/keys.hpp"
#include "ppride/nrs/nrs.hpp"

namespace ppride::nrs {

/// Client-side encoding parameters shared by every NRS user in an epoch.
struct NrsEncoding {
  std::size_t m = 0;
  std::size_t alpha = 0;
  std::size_t max_items = 60;  // largest cell set a filter may hold
  std::size_t time_slots = bloom::kNrsTimeSlots;
  bloom::EpochKey key{};

  /// Throws std::invalid_argument when the time vector does not fit in m.
  void validate() const;
};

/// The four plaintext vectors behind an offer or request.
struct PlainTrip {
  bloom::BloomFilter pickup;
  bloom::BloomFilter dropoff;
  bloom::BloomFilter route;
  BitVector time;  // one-hot slots, zero-padded to m
};

/// Errors: empty or oversized cell set, cell from another epoch.
PlainTrip encode_offer(const std::vector<bloom::CellId>& pickup_cells,
                       const std::vector<bloom::CellId>& dropoff_cells,
                       const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                       const NrsEncoding& enc);

PlainTrip encode_request(bloom::CellId pickup_cell, bloom::CellId dropoff_cell,
                         const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                         const NrsEncoding& enc);

/// Encrypts the four vectors with a DriverNrs key set.
NrsOffer encrypt_offer(const PlainTrip& trip, std::uint32_t capacity, std::vector<RideCase> cases,
                       const knn::UserKeySet& keys, Rng& rng);

/// Encrypts the four vectors with a RiderNrs key set.
NrsRequest encrypt_request(const PlainTrip& trip, const knn::UserKeySet& keys, Rng& rng);

NrsOffer build_offer(const std::vector<bloom::CellId>& pickup_cells,
                     const std::vector<bloom::CellId>& dropoff_cells,
                     const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                     std::uint32_t capacity, std::vector<RideCase> cases, const knn::UserKeySet& keys,
                     const NrsEncoding& enc, Rng& rng);

NrsRequest build_request(bloom::CellId pickup_cell, bloom::CellId dropoff_cell,
                         const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                         const knn::UserKeySet& keys, const NrsEncoding& enc, Rng& rng);

}  // namespace ppride::nrs
