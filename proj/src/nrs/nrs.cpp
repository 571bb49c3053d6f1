#include "ppride/nrs/nrs.hpp"

#include <stdexcept>
#include <string>

namespace ppride::nrs {

using knn::EncryptedIndex;
using knn::Orientation;

std::string_view to_string(RideCase c) {
  switch (c) {
    case RideCase::MpMd: return "MP/MD";
    case RideCase::MpRd: return "MP/RD";
    case RideCase::MpEd: return "MP/ED";
  }
  return "?";
}

RideCase ride_case_from_byte(std::uint8_t b) {
  if (b > 2) throw DecodeError("unknown ride case " + std::to_string(b));
  return static_cast<RideCase>(b);
}

namespace {

void check_indices(const EncryptedIndex* const (&idx)[4], Orientation want, const char* what) {
  const std::size_t dim = idx[0]->dim();
  for (const auto* i : idx) {
    if (i->dim() != dim || dim == 0) {
      throw std::invalid_argument(std::string(what) + " indices have inconsistent dimensions");
    }
    if (i->orientation() != want || i->scheme() != knn::Scheme::Nrs) {
      throw std::invalid_argument(std::string(what) + " index has the wrong form");
    }
  }
}

void put_indices(ByteWriter& out, const EncryptedIndex& a, const EncryptedIndex& b,
                 const EncryptedIndex& c, const EncryptedIndex& d) {
  a.serialize(out);
  b.serialize(out);
  c.serialize(out);
  d.serialize(out);
}

bool at_alpha(const EncryptedIndex& rider, const EncryptedIndex& driver, std::size_t alpha) {
  return knn::similarity_equals(knn::match_similarity(rider, driver), static_cast<double>(alpha));
}

}  // namespace

void NrsOffer::validate() const {
  if (capacity == 0) throw std::invalid_argument("offer capacity must be >= 1");
  if (accepted_cases.empty()) throw std::invalid_argument("offer must accept at least one case");
  check_indices({&pickup, &dropoff, &route, &time}, Orientation::Column, "offer");
}

void NrsRequest::validate() const {
  check_indices({&pickup, &dropoff, &route, &time}, Orientation::Row, "request");
}

void NrsOffer::serialize(ByteWriter& out) const {
  out.put(offer_id);
  put_indices(out, pickup, dropoff, route, time);
  out.put(capacity);
  out.put(static_cast<std::uint8_t>(accepted_cases.size()));
  for (auto c : accepted_cases) out.put(static_cast<std::uint8_t>(c));
  out.put_blob(contact_blob);
  out.put_blob(auth_token);
}

NrsOffer NrsOffer::deserialize(ByteReader& in) {
  NrsOffer o;
  o.offer_id = in.get<std::uint64_t>();
  o.pickup = EncryptedIndex::deserialize(in);
  o.dropoff = EncryptedIndex::deserialize(in);
  o.route = EncryptedIndex::deserialize(in);
  o.time = EncryptedIndex::deserialize(in);
  o.capacity = in.get<std::uint32_t>();
  const auto n = in.get<std::uint8_t>();
  for (std::uint8_t i = 0; i < n; ++i) o.accepted_cases.push_back(ride_case_from_byte(in.get<std::uint8_t>()));
  o.contact_blob = in.get_blob();
  o.auth_token = in.get_blob();
  return o;
}

void NrsRequest::serialize(ByteWriter& out) const {
  out.put(request_id);
  put_indices(out, pickup, dropoff, route, time);
  out.put_blob(contact_blob);
  out.put_blob(auth_token);
}

NrsRequest NrsRequest::deserialize(ByteReader& in) {
  NrsRequest r;
  r.request_id = in.get<std::uint64_t>();
  r.pickup = EncryptedIndex::deserialize(in);
  r.dropoff = EncryptedIndex::deserialize(in);
  r.route = EncryptedIndex::deserialize(in);
  r.time = EncryptedIndex::deserialize(in);
  r.contact_blob = in.get_blob();
  r.auth_token = in.get_blob();
  return r;
}

NrsOffer unmask_offer(const NrsOffer& offer, const knn::TosSecrets& tos) {
  NrsOffer out = offer;
  out.pickup = knn::unmask(offer.pickup, tos);
  out.dropoff = knn::unmask(offer.dropoff, tos);
  out.route = knn::unmask(offer.route, tos);
  out.time = knn::unmask(offer.time, tos);
  return out;
}

NrsRequest unmask_request(const NrsRequest& request, const knn::TosSecrets& tos) {
  NrsRequest out = request;
  out.pickup = knn::unmask(request.pickup, tos);
  out.dropoff = knn::unmask(request.dropoff, tos);
  out.route = knn::unmask(request.route, tos);
  out.time = knn::unmask(request.time, tos);
  return out;
}

std::optional<RideCase> match_pair(const NrsOffer& offer, const NrsRequest& request, std::size_t alpha) {
  if (offer.dim() != request.dim()) throw std::invalid_argument("offer and request dimensions differ");
  if (!knn::similarity_equals(knn::match_similarity(request.time, offer.time), 1.0)) return std::nullopt;
  if (!at_alpha(request.pickup, offer.pickup, alpha)) return std::nullopt;
  for (auto c : offer.accepted_cases) {
    bool ok = false;
    switch (c) {
      case RideCase::MpMd: ok = at_alpha(request.dropoff, offer.dropoff, alpha); break;
      case RideCase::MpRd: ok = at_alpha(request.dropoff, offer.route, alpha); break;
      // exact alpha is a membership test only for a one-cell drop-off area
      case RideCase::MpEd: ok = at_alpha(request.route, offer.dropoff, alpha); break;
    }
    if (ok) return c;
  }
  return std::nullopt;
}

std::optional<NrsMatch> match_pair(const NrsOffer& offer, const NrsRequest& request,
                                   const knn::TosSecrets& tos, std::size_t alpha) {
  const NrsOffer o = offer.pickup.unmasked() ? offer : unmask_offer(offer, tos);
  const NrsRequest r = request.pickup.unmasked() ? request : unmask_request(request, tos);
  if (auto c = match_pair(o, r, alpha)) return NrsMatch{offer.offer_id, request.request_id, *c};
  return std::nullopt;
}

std::vector<NrsMatch> match_all(const std::vector<NrsOffer>& offers,
                                const std::vector<NrsRequest>& requests, std::size_t alpha) {
  std::vector<std::uint32_t> remaining;
  remaining.reserve(offers.size());
  for (const auto& o : offers) remaining.push_back(o.capacity);

  std::vector<NrsMatch> out;
  for (const auto& r : requests) {
    for (std::size_t i = 0; i < offers.size(); ++i) {
      if (remaining[i] == 0) continue;
      if (auto c = match_pair(offers[i], r, alpha)) {
        --remaining[i];
        out.push_back({offers[i].offer_id, r.request_id, *c});
        break;
      }
    }
  }
  return out;
}

std::vector<NrsMatch> match_all(const std::vector<NrsOffer>& offers,
                                const std::vector<NrsRequest>& requests, const knn::TosSecrets& tos,
                                std::size_t alpha) {
  std::vector<NrsOffer> uo;
  std::vector<NrsRequest> ur;
  uo.reserve(offers.size());
  ur.reserve(requests.size());
  for (const auto& o : offers) uo.push_back(o.pickup.unmasked() ? o : unmask_offer(o, tos));
  for (const auto& r : requests) ur.push_back(r.pickup.unmasked() ? r : unmask_request(r, tos));
  return match_all(uo, ur, alpha);
}

}  // namespace ppride::nrs
