#pragma once

// Payloads the organizing server reads and writes. Nothing here carries key
// material or plaintext locations.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ppride/common/bytes.hpp"
#include "ppride/knn/params.hpp"
#include "ppride/nrs/nrs.hpp"
#include "ppride/trs/offer.hpp"
#include "ppride/trs/search.hpp"
#include "ppride/tos/wire.hpp"

namespace ppride::tos {

/// Public parameters of one epoch.
struct SystemInfo {
  std::uint64_t epoch = 0;
  std::uint64_t salt = 0;
  std::uint32_t m = 0;
  std::uint32_t alpha = 0;
  std::uint32_t max_items = 0;
  std::uint32_t time_slots = 0;  // NRS day slots
  std::uint32_t k = 0;
  std::uint32_t ell = 0;
  bool keys_rotated = false;

  std::uint32_t n() const { return 2 * k + ell; }

  void serialize(ByteWriter& out) const;
  static SystemInfo deserialize(ByteReader& in);
  bool operator==(const SystemInfo&) const = default;
};

enum class ErrorCode : std::uint16_t {
  BadFrame = 1,
  StaleEpoch = 2,
  BadToken = 3,
  BadPayload = 4,
  UnknownType = 5,
  Internal = 6,
};

std::string_view to_string(ErrorCode c);

struct ErrorMsg {
  ErrorCode code = ErrorCode::Internal;
  std::string message;

  void serialize(ByteWriter& out) const;
  static ErrorMsg deserialize(ByteReader& in);
};

/// Raised client-side when the server answers with an Error envelope.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct RegisterUser {
  knn::Role role = knn::Role::RiderNrs;
};

using OfferPayload = std::variant<nrs::NrsOffer, trs::TrsOffer>;
using RequestPayload = std::variant<nrs::NrsRequest, trs::TrsRequest>;

Bytes encode_offer(const OfferPayload& offer);
OfferPayload decode_offer(std::span<const std::uint8_t> payload);
Bytes encode_request(const RequestPayload& request);
RequestPayload decode_request(std::span<const std::uint8_t> payload);

/// Id assigned to an accepted submission, or a count for RunMatching.
struct Ack {
  std::uint64_t value = 0;
};

/// One organized ride as relayed to its participants.
struct MatchResult {
  knn::Scheme scheme = knn::Scheme::Nrs;
  std::uint64_t request_id = 0;
  bool matched = false;
  std::vector<std::uint64_t> offer_ids;  // traversal order
  std::optional<nrs::RideCase> ride_case;
  std::vector<trs::NodeId> path;
  std::uint32_t cell_count = 0;
  std::uint32_t transfer_count = 0;
  bool truncated = false;
  /// Masked driver-side indices of each transfer cell, relayed as submitted.
  std::vector<knn::EncryptedIndex> transfer_cells;
  Bytes rider_contact;
  std::vector<Bytes> driver_contacts;  // parallel to offer_ids

  void serialize(ByteWriter& out) const;
  static MatchResult deserialize(ByteReader& in);
};

Bytes encode_matches(const std::vector<MatchResult>& matches);
std::vector<MatchResult> decode_matches(std::span<const std::uint8_t> payload);

Envelope make_error(ErrorCode code, const std::string& message, std::uint64_t epoch);
Envelope make_ack(std::uint64_t value, std::uint64_t epoch);
/// Throws ServiceError for an Error envelope, DecodeError for any type other
/// than `want`.
void expect_type(const Envelope& env, MsgType want);
std::uint64_t read_ack(const Envelope& env);

}  // namespace ppride::tos
