#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ppride/common/bytes.hpp"
#include "ppride/knn/encrypted_index.hpp"
#include "ppride/knn/tos_secrets.hpp"

namespace ppride::nrs {

/// Drop-off handling for a non-transferable ride.
enum class RideCase : std::uint8_t {
  MpMd = 0,  // rider destination inside the driver's drop-off area
  MpRd = 1,  // rider destination on the driver's route
  MpEd = 2,  // driver destination on the rider's route
};

std::string_view to_string(RideCase c);
RideCase ride_case_from_byte(std::uint8_t b);

/// The evaluation default order.
inline const std::vector<RideCase> kAllCases{RideCase::MpMd, RideCase::MpRd, RideCase::MpEd};

struct NrsOffer {
  std::uint64_t offer_id = 0;
  knn::EncryptedIndex pickup;
  knn::EncryptedIndex dropoff;
  knn::EncryptedIndex route;
  knn::EncryptedIndex time;
  std::uint32_t capacity = 1;
  std::vector<RideCase> accepted_cases;  // driver preference order
  Bytes contact_blob;
  Bytes auth_token;

  /// Throws std::invalid_argument on zero capacity, no cases, mixed
  /// dimensions or a rider-oriented index.
  void validate() const;
  std::size_t dim() const { return pickup.dim(); }

  void serialize(ByteWriter& out) const;
  static NrsOffer deserialize(ByteReader& in);
};

struct NrsRequest {
  std::uint64_t request_id = 0;
  knn::EncryptedIndex pickup;
  knn::EncryptedIndex dropoff;
  knn::EncryptedIndex route;
  knn::EncryptedIndex time;
  Bytes contact_blob;
  Bytes auth_token;

  void validate() const;
  std::size_t dim() const { return pickup.dim(); }

  void serialize(ByteWriter& out) const;
  static NrsRequest deserialize(ByteReader& in);
};

struct NrsMatch {
  std::uint64_t offer_id = 0;
  std::uint64_t request_id = 0;
  RideCase ride_case = RideCase::MpMd;

  auto operator<=>(const NrsMatch&) const = default;
};

/// Unmasks all four indices.
NrsOffer unmask_offer(const NrsOffer& offer, const knn::TosSecrets& tos);
NrsRequest unmask_request(const NrsRequest& request, const knn::TosSecrets& tos);

/// Gate order: time similarity 1, pick-up similarity alpha, then the first
/// accepted case whose drop-off test reaches alpha. Both sides must already
/// be unmasked.
std::optional<RideCase> match_pair(const NrsOffer& offer, const NrsRequest& request, std::size_t alpha);

/// Unmasks whichever side still carries the server mask, then matches.
std::optional<NrsMatch> match_pair(const NrsOffer& offer, const NrsRequest& request,
                                   const knn::TosSecrets& tos, std::size_t alpha);

/// Greedy assignment in request order: each request takes the first offer
/// (in list order) with spare capacity that it matches. Inputs must be
/// unmasked.
std::vector<NrsMatch> match_all(const std::vector<NrsOffer>& offers,
                                const std::vector<NrsRequest>& requests, std::size_t alpha);

std::vector<NrsMatch> match_all(const std::vector<NrsOffer>& offers,
                                const std::vector<NrsRequest>& requests, const knn::TosSecrets& tos,
                                std::size_t alpha);

}  // namespace ppride::nrs
