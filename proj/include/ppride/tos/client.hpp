#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ppride/bloom/cell.hpp"
#include "ppride/nrs/nrs.hpp"
#include "ppride/tos/authority.hpp"
#include "ppride/tos/transport.hpp"
#include "ppride/trs/preference.hpp"

namespace ppride::tos {

/// A physical cell and the time (seconds since midnight) it is passed.
struct Waypoint {
  std::uint32_t cell = 0;
  std::uint32_t time = 0;
};

/// A rider or driver device. Holds its key bundle and the current epoch's
/// codebook; everything sent is encrypted under them. On a stale-epoch reply
/// it registers again and retries once.
class RideClient {
 public:
  RideClient(Transport& transport, knn::Role role, std::uint64_t seed);

  SystemInfo fetch_info();
  const KeyBundle& register_user();
  bool registered() const { return bundle_.has_value(); }
  const KeyBundle& bundle() const;
  knn::Role role() const { return role_; }
  std::size_t tokens_left() const { return bundle_ ? bundle_->tokens.size() : 0; }

  /// NRS driver. Areas and route are physical cell ids.
  std::uint64_t offer_nrs(const std::vector<std::uint32_t>& pickup_area,
                          const std::vector<std::uint32_t>& dropoff_area,
                          const std::vector<std::uint32_t>& route, std::uint32_t depart_time,
                          std::uint32_t capacity, std::vector<nrs::RideCase> cases, Bytes contact = {});

  /// NRS rider.
  std::uint64_t request_nrs(std::uint32_t pickup, std::uint32_t dropoff,
                            const std::vector<std::uint32_t>& route, std::uint32_t depart_time,
                            Bytes contact = {});

  /// TRS driver: the route in travel order with passing times.
  std::uint64_t offer_trs(const std::vector<Waypoint>& route, std::uint32_t capacity, Bytes contact = {});

  /// TRS rider: drop-off time is the expected arrival.
  std::uint64_t request_trs(Waypoint pickup, Waypoint dropoff, const trs::Preference& preference,
                            Bytes contact = {});

  std::vector<MatchResult> poll(std::uint64_t submission_id);

  /// Operator command: runs one matching round for a scheme.
  std::vector<MatchResult> run_matching(knn::Scheme scheme);

 private:
  std::uint64_t submit(MsgType type, const std::function<Bytes()>& build);
  Token next_token();
  void require_role(knn::Role want) const;
  bloom::CellId cell(std::uint32_t physical) const;

  Transport& transport_;
  knn::Role role_;
  Rng rng_;
  std::optional<KeyBundle> bundle_;
  std::unique_ptr<bloom::EpochCodebook> codebook_;
  std::map<std::uint64_t, Token> owned_;
};

}  // namespace ppride::tos
