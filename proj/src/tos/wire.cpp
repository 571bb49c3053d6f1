#include "ppride/tos/wire.hpp"

#include <algorithm>
#include <string>

namespace ppride::tos {

std::string_view to_string(MsgType t) {
  switch (t) {
    case MsgType::RegisterUser: return "RegisterUser";
    case MsgType::KeyBundle: return "KeyBundle";
    case MsgType::SubmitOffer: return "SubmitOffer";
    case MsgType::SubmitRequest: return "SubmitRequest";
    case MsgType::MatchNotification: return "MatchNotification";
    case MsgType::EpochAnnounce: return "EpochAnnounce";
    case MsgType::Error: return "Error";
    case MsgType::Ack: return "Ack";
    case MsgType::RunMatching: return "RunMatching";
    case MsgType::PollNotifications: return "PollNotifications";
  }
  return "?";
}

Bytes encode_frame(const Envelope& env) {
  const std::size_t body = kHeaderSize + env.payload.size();
  if (body > kMaxFrame) throw std::length_error("frame too large");
  Bytes out;
  out.reserve(4 + body);
  ByteWriter w(out);
  w.put(static_cast<std::uint32_t>(body));
  w.put(static_cast<std::uint8_t>(env.type));
  w.put(env.epoch);
  w.put_bytes(env.token);
  w.put_bytes(env.payload);
  return out;
}

std::uint32_t frame_body_length(std::span<const std::uint8_t, 4> prefix) {
  ByteReader r(prefix);
  return r.get<std::uint32_t>();
}

Envelope decode_frame(std::span<const std::uint8_t> frame) {
  ByteReader r(frame);
  const auto body = r.get<std::uint32_t>();
  if (body < kHeaderSize || body > kMaxFrame) throw DecodeError("bad frame length " + std::to_string(body));
  if (r.remaining() != body) throw DecodeError("frame length does not match buffer");
  Envelope env;
  const auto type = r.get<std::uint8_t>();
  if (type > static_cast<std::uint8_t>(MsgType::PollNotifications)) {
    throw DecodeError("unknown message type " + std::to_string(type));
  }
  env.type = static_cast<MsgType>(type);
  env.epoch = r.get<std::uint64_t>();
  auto tok = r.get_bytes(env.token.size());
  std::copy(tok.begin(), tok.end(), env.token.begin());
  auto rest = r.get_bytes(r.remaining());
  env.payload.assign(rest.begin(), rest.end());
  return env;
}

bool has_token(const Envelope& env) {
  return std::any_of(env.token.begin(), env.token.end(), [](std::uint8_t b) { return b != 0; });
}

}  // namespace ppride::tos
