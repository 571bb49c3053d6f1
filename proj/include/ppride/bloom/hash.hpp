#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace ppride::bloom {

/// MurmurHash3 x64 128-bit (Appleby's reference algorithm).
std::array<std::uint64_t, 2> murmur3_128(std::span<const std::uint8_t> data, std::uint32_t seed = 0);

}  // namespace ppride::bloom
