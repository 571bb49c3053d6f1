#include "ppride/nrs/trip_builder.hpp"

#include <stdexcept>
#include <string>

#include "ppride/knn/encrypt.hpp"

namespace ppride::nrs {

namespace {

bloom::BloomFilter filter_of(const std::vector<bloom::CellId>& cells, const NrsEncoding& enc,
                             const char* what) {
  if (cells.empty()) throw std::invalid_argument(std::string(what) + " cell set is empty");
  if (cells.size() > enc.max_items) {
    throw std::invalid_argument(std::string(what) + " cell set has " + std::to_string(cells.size()) +
                                " cells, more than the " + std::to_string(enc.max_items) +
                                " the filter is sized for");
  }
  return bloom::make_filter(enc.m, enc.alpha, enc.key, cells);
}

BitVector time_vector(std::uint32_t depart_time, const NrsEncoding& enc) {
  return bloom::encode_time_slot(depart_time, enc.time_slots).padded(enc.m);
}

void check_role(const knn::UserKeySet& keys, knn::Role want) {
  if (keys.role() != want) {
    throw std::invalid_argument("expected " + std::string(knn::to_string(want)) + " keys, got " +
                                std::string(knn::to_string(keys.role())));
  }
}

}  // namespace

void NrsEncoding::validate() const {
  if (m == 0 || alpha == 0 || alpha > m) throw std::invalid_argument("bad filter size or alpha");
  if (time_slots == 0 || time_slots > m) {
    throw std::invalid_argument("time vector of " + std::to_string(time_slots) +
                                " slots does not fit in m=" + std::to_string(m));
  }
  if (max_items == 0) throw std::invalid_argument("max_items must be >= 1");
}

PlainTrip encode_offer(const std::vector<bloom::CellId>& pickup_cells,
                       const std::vector<bloom::CellId>& dropoff_cells,
                       const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                       const NrsEncoding& enc) {
  enc.validate();
  return PlainTrip{filter_of(pickup_cells, enc, "pick-up"), filter_of(dropoff_cells, enc, "drop-off"),
                   filter_of(route_cells, enc, "route"), time_vector(depart_time, enc)};
}

PlainTrip encode_request(bloom::CellId pickup_cell, bloom::CellId dropoff_cell,
                         const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                         const NrsEncoding& enc) {
  enc.validate();
  return PlainTrip{filter_of({pickup_cell}, enc, "pick-up"), filter_of({dropoff_cell}, enc, "drop-off"),
                   filter_of(route_cells, enc, "route"), time_vector(depart_time, enc)};
}

NrsOffer encrypt_offer(const PlainTrip& trip, std::uint32_t capacity, std::vector<RideCase> cases,
                       const knn::UserKeySet& keys, Rng& rng) {
  check_role(keys, knn::Role::DriverNrs);
  NrsOffer o;
  o.pickup = knn::encrypt_index(trip.pickup.bits(), keys, rng);
  o.dropoff = knn::encrypt_index(trip.dropoff.bits(), keys, rng);
  o.route = knn::encrypt_index(trip.route.bits(), keys, rng);
  o.time = knn::encrypt_index(trip.time, keys, rng);
  o.capacity = capacity;
  o.accepted_cases = std::move(cases);
  o.validate();
  return o;
}

NrsRequest encrypt_request(const PlainTrip& trip, const knn::UserKeySet& keys, Rng& rng) {
  check_role(keys, knn::Role::RiderNrs);
  NrsRequest r;
  r.pickup = knn::encrypt_index(trip.pickup.bits(), keys, rng);
  r.dropoff = knn::encrypt_index(trip.dropoff.bits(), keys, rng);
  r.route = knn::encrypt_index(trip.route.bits(), keys, rng);
  r.time = knn::encrypt_index(trip.time, keys, rng);
  return r;
}

NrsOffer build_offer(const std::vector<bloom::CellId>& pickup_cells,
                     const std::vector<bloom::CellId>& dropoff_cells,
                     const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                     std::uint32_t capacity, std::vector<RideCase> cases, const knn::UserKeySet& keys,
                     const NrsEncoding& enc, Rng& rng) {
  if (cases.empty()) throw std::invalid_argument("offer must accept at least one case");
  if (capacity == 0) throw std::invalid_argument("offer capacity must be >= 1");
  return encrypt_offer(encode_offer(pickup_cells, dropoff_cells, route_cells, depart_time, enc),
                       capacity, std::move(cases), keys, rng);
}

NrsRequest build_request(bloom::CellId pickup_cell, bloom::CellId dropoff_cell,
                         const std::vector<bloom::CellId>& route_cells, std::uint32_t depart_time,
                         const knn::UserKeySet& keys, const NrsEncoding& enc, Rng& rng) {
  return encrypt_request(encode_request(pickup_cell, dropoff_cell, route_cells, depart_time, enc), keys, rng);
}

}  // namespace ppride::nrs
