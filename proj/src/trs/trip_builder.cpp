#include "ppride/trs/trip_builder.hpp"

#include <stdexcept>
#include <string>

#include "ppride/knn/encrypt.hpp"
#include "ppride/trs/cell_vector.hpp"

namespace ppride::trs {

namespace {

void check_role(const knn::UserKeySet& keys, knn::Role want, const knn::SchemeParams& params) {
  if (keys.role() != want) {
    throw std::invalid_argument("expected " + std::string(knn::to_string(want)) + " keys, got " +
                                std::string(knn::to_string(keys.role())));
  }
  if (keys.dim() != params.n()) throw std::invalid_argument("key dimension does not match 2k + ell");
}

BitVector vector_of(const TimedCell& c, const knn::SchemeParams& params) {
  return encode_cell(c.cell, time_interval(c.time, params.ell), params);
}

}  // namespace

TrsOffer build_offer(const std::vector<TimedCell>& route, std::uint32_t capacity,
                     const knn::UserKeySet& driver_keys, const knn::UserKeySet& rider_keys,
                     const knn::SchemeParams& params, Rng& rng) {
  check_role(driver_keys, knn::Role::DriverTrs, params);
  check_role(rider_keys, knn::Role::RiderTrs, params);
  if (route.size() < 2) throw std::invalid_argument("a route needs at least 2 cells");
  TrsOffer o;
  o.capacity = capacity;
  o.cells.reserve(route.size());
  for (const auto& c : route) {
    const auto v = vector_of(c, params);
    o.cells.push_back(TrsCell{knn::encrypt_index(v, driver_keys, rng), knn::encrypt_index(v, rider_keys, rng)});
  }
  o.validate();
  return o;
}

TrsRequest build_request(TimedCell pickup, TimedCell dropoff, Preference preference,
                         const knn::UserKeySet& rider_keys, const knn::SchemeParams& params, Rng& rng) {
  check_role(rider_keys, knn::Role::RiderTrs, params);
  preference.validate();
  TrsRequest r;
  r.pickup = knn::encrypt_index(vector_of(pickup, params), rider_keys, rng);
  r.dropoff = knn::encrypt_index(vector_of(dropoff, params), rider_keys, rng);
  r.preference = preference;
  return r;
}

}  // namespace ppride::trs
