#include "ppride/tos/protocol.hpp"

#include <string>

#ifdef PPRIDE_USER_KEY_MATERIAL
#error "server protocol code must not see user key material"
#endif
#ifdef PPRIDE_PLAINTEXT_LOCATION
#error "server protocol code must not see plaintext locations"
#endif

namespace ppride::tos {

void SystemInfo::serialize(ByteWriter& out) const {
  out.put(epoch);
  out.put(salt);
  out.put(m);
  out.put(alpha);
  out.put(max_items);
  out.put(time_slots);
  out.put(k);
  out.put(ell);
  out.put(static_cast<std::uint8_t>(keys_rotated));
}

SystemInfo SystemInfo::deserialize(ByteReader& in) {
  SystemInfo s;
  s.epoch = in.get<std::uint64_t>();
  s.salt = in.get<std::uint64_t>();
  s.m = in.get<std::uint32_t>();
  s.alpha = in.get<std::uint32_t>();
  s.max_items = in.get<std::uint32_t>();
  s.time_slots = in.get<std::uint32_t>();
  s.k = in.get<std::uint32_t>();
  s.ell = in.get<std::uint32_t>();
  s.keys_rotated = in.get<std::uint8_t>() != 0;
  return s;
}

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadFrame: return "bad frame";
    case ErrorCode::StaleEpoch: return "stale epoch";
    case ErrorCode::BadToken: return "bad token";
    case ErrorCode::BadPayload: return "bad payload";
    case ErrorCode::UnknownType: return "unknown message type";
    case ErrorCode::Internal: return "internal error";
  }
  return "?";
}

void ErrorMsg::serialize(ByteWriter& out) const {
  out.put(static_cast<std::uint16_t>(code));
  out.put_string(message);
}

ErrorMsg ErrorMsg::deserialize(ByteReader& in) {
  ErrorMsg e;
  e.code = static_cast<ErrorCode>(in.get<std::uint16_t>());
  e.message = in.get_string();
  return e;
}

Bytes encode_offer(const OfferPayload& offer) {
  ByteWriter w;
  w.put(static_cast<std::uint8_t>(offer.index()));
  std::visit([&](const auto& o) { o.serialize(w); }, offer);
  return w.take();
}

OfferPayload decode_offer(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto scheme = r.get<std::uint8_t>();
  OfferPayload out;
  if (scheme == 0) {
    out = nrs::NrsOffer::deserialize(r);
  } else if (scheme == 1) {
    out = trs::TrsOffer::deserialize(r);
  } else {
    throw DecodeError("unknown scheme " + std::to_string(scheme));
  }
  r.expect_done();
  return out;
}

Bytes encode_request(const RequestPayload& request) {
  ByteWriter w;
  w.put(static_cast<std::uint8_t>(request.index()));
  std::visit([&](const auto& q) { q.serialize(w); }, request);
  return w.take();
}

RequestPayload decode_request(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto scheme = r.get<std::uint8_t>();
  RequestPayload out;
  if (scheme == 0) {
    out = nrs::NrsRequest::deserialize(r);
  } else if (scheme == 1) {
    out = trs::TrsRequest::deserialize(r);
  } else {
    throw DecodeError("unknown scheme " + std::to_string(scheme));
  }
  r.expect_done();
  return out;
}

void MatchResult::serialize(ByteWriter& out) const {
  out.put(static_cast<std::uint8_t>(scheme));
  out.put(request_id);
  out.put(static_cast<std::uint8_t>(matched));
  out.put(static_cast<std::uint32_t>(offer_ids.size()));
  for (auto id : offer_ids) out.put(id);
  out.put(static_cast<std::uint8_t>(ride_case ? static_cast<std::uint8_t>(*ride_case) : 0xff));
  out.put(static_cast<std::uint32_t>(path.size()));
  for (const auto& n : path) {
    out.put(n.offer_id);
    out.put(n.position);
  }
  out.put(cell_count);
  out.put(transfer_count);
  out.put(static_cast<std::uint8_t>(truncated));
  out.put(static_cast<std::uint32_t>(transfer_cells.size()));
  for (const auto& c : transfer_cells) c.serialize(out);
  out.put_blob(rider_contact);
  out.put(static_cast<std::uint32_t>(driver_contacts.size()));
  for (const auto& c : driver_contacts) out.put_blob(c);
}

MatchResult MatchResult::deserialize(ByteReader& in) {
  MatchResult m;
  const auto scheme = in.get<std::uint8_t>();
  if (scheme > 1) throw DecodeError("unknown scheme");
  m.scheme = static_cast<knn::Scheme>(scheme);
  m.request_id = in.get<std::uint64_t>();
  m.matched = in.get<std::uint8_t>() != 0;
  auto count = [&](std::size_t min_each) {
    const auto n = in.get<std::uint32_t>();
    if (min_each && n > in.remaining() / min_each) throw DecodeError("element count exceeds payload");
    return n;
  };
  const auto n_offers = count(8);
  for (std::uint32_t i = 0; i < n_offers; ++i) m.offer_ids.push_back(in.get<std::uint64_t>());
  const auto rc = in.get<std::uint8_t>();
  if (rc != 0xff) m.ride_case = nrs::ride_case_from_byte(rc);
  const auto n_path = count(12);
  for (std::uint32_t i = 0; i < n_path; ++i) {
    trs::NodeId id;
    id.offer_id = in.get<std::uint64_t>();
    id.position = in.get<std::uint32_t>();
    m.path.push_back(id);
  }
  m.cell_count = in.get<std::uint32_t>();
  m.transfer_count = in.get<std::uint32_t>();
  m.truncated = in.get<std::uint8_t>() != 0;
  const auto n_cells = count(7);
  for (std::uint32_t i = 0; i < n_cells; ++i) m.transfer_cells.push_back(knn::EncryptedIndex::deserialize(in));
  m.rider_contact = in.get_blob();
  const auto n_contacts = count(4);
  for (std::uint32_t i = 0; i < n_contacts; ++i) m.driver_contacts.push_back(in.get_blob());
  return m;
}

Bytes encode_matches(const std::vector<MatchResult>& matches) {
  ByteWriter w;
  w.put(static_cast<std::uint32_t>(matches.size()));
  for (const auto& m : matches) m.serialize(w);
  return w.take();
}

std::vector<MatchResult> decode_matches(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto n = r.get<std::uint32_t>();
  std::vector<MatchResult> out;
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(MatchResult::deserialize(r));
  r.expect_done();
  return out;
}

Envelope make_error(ErrorCode code, const std::string& message, std::uint64_t epoch) {
  ByteWriter w;
  ErrorMsg{code, message}.serialize(w);
  return Envelope{MsgType::Error, epoch, {}, w.take()};
}

Envelope make_ack(std::uint64_t value, std::uint64_t epoch) {
  ByteWriter w;
  w.put(value);
  return Envelope{MsgType::Ack, epoch, {}, w.take()};
}

void expect_type(const Envelope& env, MsgType want) {
  if (env.type == MsgType::Error) {
    ByteReader r(env.payload);
    auto e = ErrorMsg::deserialize(r);
    throw ServiceError(e.code, e.message);
  }
  if (env.type != want) {
    throw DecodeError("expected " + std::string(to_string(want)) + ", got " + std::string(to_string(env.type)));
  }
}

std::uint64_t read_ack(const Envelope& env) {
  expect_type(env, MsgType::Ack);
  ByteReader r(env.payload);
  auto v = r.get<std::uint64_t>();
  r.expect_done();
  return v;
}

}  // namespace ppride::tos
