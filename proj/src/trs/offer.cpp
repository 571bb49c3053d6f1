#include "ppride/trs/offer.hpp"

#include <stdexcept>
#include <string>

namespace ppride::trs {

using knn::EncryptedIndex;
using knn::Orientation;

namespace {

void check(const EncryptedIndex& i, Orientation want, std::size_t dim, const char* what) {
  if (i.scheme() != knn::Scheme::Trs || i.orientation() != want) {
    throw std::invalid_argument(std::string(what) + " index has the wrong form");
  }
  if (i.dim() != dim || dim == 0) throw std::invalid_argument(std::string(what) + " index dimension mismatch");
}

}  // namespace

void TrsOffer::validate() const {
  if (cells.size() < 2) throw std::invalid_argument("a route needs at least 2 cells");
  if (capacity == 0) throw std::invalid_argument("offer capacity must be >= 1");
  const auto d = dim();
  for (const auto& c : cells) {
    check(c.plus, Orientation::Column, d, "offer plus");
    check(c.minus, Orientation::Row, d, "offer minus");
  }
}

void TrsRequest::validate() const {
  check(pickup, Orientation::Row, dim(), "request pick-up");
  check(dropoff, Orientation::Row, dim(), "request drop-off");
  preference.validate();
}

void TrsOffer::serialize(ByteWriter& out) const {
  out.put(offer_id);
  out.put(static_cast<std::uint32_t>(cells.size()));
  for (const auto& c : cells) {
    c.plus.serialize(out);
    c.minus.serialize(out);
  }
  out.put(capacity);
  out.put_blob(contact_blob);
  out.put_blob(auth_token);
}

TrsOffer TrsOffer::deserialize(ByteReader& in) {
  TrsOffer o;
  o.offer_id = in.get<std::uint64_t>();
  const auto n = in.get<std::uint32_t>();
  // each cell needs at least two index headers
  if (n > in.remaining() / 14) throw DecodeError("cell count exceeds payload");
  o.cells.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    TrsCell c;
    c.plus = EncryptedIndex::deserialize(in);
    c.minus = EncryptedIndex::deserialize(in);
    o.cells.push_back(std::move(c));
  }
  o.capacity = in.get<std::uint32_t>();
  o.contact_blob = in.get_blob();
  o.auth_token = in.get_blob();
  return o;
}

void TrsRequest::serialize(ByteWriter& out) const {
  out.put(request_id);
  pickup.serialize(out);
  dropoff.serialize(out);
  preference.serialize(out);
  out.put_blob(contact_blob);
  out.put_blob(auth_token);
}

TrsRequest TrsRequest::deserialize(ByteReader& in) {
  TrsRequest r;
  r.request_id = in.get<std::uint64_t>();
  r.pickup = EncryptedIndex::deserialize(in);
  r.dropoff = EncryptedIndex::deserialize(in);
  r.preference = Preference::deserialize(in);
  r.contact_blob = in.get_blob();
  r.auth_token = in.get_blob();
  return r;
}

TrsOffer unmask_offer(const TrsOffer& offer, const knn::TosSecrets& tos) {
  TrsOffer out = offer;
  for (auto& c : out.cells) {
    c.plus = knn::unmask(c.plus, tos);
    c.minus = knn::unmask(c.minus, tos);
  }
  return out;
}

TrsRequest unmask_request(const TrsRequest& request, const knn::TosSecrets& tos) {
  TrsRequest out = request;
  out.pickup = knn::unmask(request.pickup, tos);
  out.dropoff = knn::unmask(request.dropoff, tos);
  return out;
}

}  // namespace ppride::trs
