#pragma once

#include <cstdint>
#include <vector>

#include "ppride/bloom/cell.hpp"
#include "ppride/knn/keys.hpp"
#include "ppride/trs/offer.hpp"

namespace ppride::trs {

/// A route cell and the time the driver passes it.
struct TimedCell {
  bloom::CellId cell;
  std::uint32_t time = 0;  // seconds since midnight
};

/// Encrypts every route cell twice: with the DriverTrs keys (plus) and the
/// RiderTrs keys (minus).
TrsOffer build_offer(const std::vector<TimedCell>& route, std::uint32_t capacity,
                     const knn::UserKeySet& driver_keys, const knn::UserKeySet& rider_keys,
                     const knn::SchemeParams& params, Rng& rng);

/// Pick-up at its departure time, drop-off at the expected arrival time.
TrsRequest build_request(TimedCell pickup, TimedCell dropoff, Preference preference,
                         const knn::UserKeySet& rider_keys, const knn::SchemeParams& params, Rng& rng);

}  // namespace ppride::trs
