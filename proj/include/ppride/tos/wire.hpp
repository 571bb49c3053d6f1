#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "ppride/common/bytes.hpp"

namespace ppride::tos {

enum class MsgType : std::uint8_t {
  RegisterUser = 0,
  KeyBundle = 1,
  SubmitOffer = 2,
  SubmitRequest = 3,
  MatchNotification = 4,
  EpochAnnounce = 5,
  Error = 6,
  Ack = 7,
  RunMatching = 8,
  PollNotifications = 9,
};

std::string_view to_string(MsgType t);

using Token = std::array<std::uint8_t, 32>;

struct Envelope {
  MsgType type = MsgType::Error;
  std::uint64_t epoch = 0;
  Token token{};  // all zeros when the message carries none
  Bytes payload;
};

/// msg_type + epoch + token
inline constexpr std::size_t kHeaderSize = 1 + 8 + 32;
inline constexpr std::size_t kMaxFrame = std::size_t{1} << 30;

/// [u32 length of the rest][u8 type][u64 epoch][32-byte token][payload]
Bytes encode_frame(const Envelope& env);

/// Decodes one complete frame. Throws DecodeError on a short, oversized or
/// inconsistent frame or an unknown message type.
Envelope decode_frame(std::span<const std::uint8_t> frame);

/// Length of the frame body announced by a 4-byte prefix.
std::uint32_t frame_body_length(std::span<const std::uint8_t, 4> prefix);

bool has_token(const Envelope& env);

}  // namespace ppride::tos
