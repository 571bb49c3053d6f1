#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace ppride {

using Bytes = std::vector<std::uint8_t>;

/// Raised when a byte buffer is truncated or structurally invalid.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Appends little-endian scalars to a growing buffer.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes& out) : out_(&out) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    auto raw = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf().push_back(static_cast<std::uint8_t>(raw >> (8 * i)));
    }
  }

  void put_bytes(std::span<const std::uint8_t> bytes) {
    buf().insert(buf().end(), bytes.begin(), bytes.end());
  }

  /// u32 length prefix followed by the bytes.
  void put_blob(std::span<const std::uint8_t> bytes) {
    put(static_cast<std::uint32_t>(bytes.size()));
    put_bytes(bytes);
  }

  void put_string(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    buf().insert(buf().end(), s.begin(), s.end());
  }

  const Bytes& bytes() const { return out_ ? *out_ : own_; }
  Bytes take() { return out_ ? *out_ : std::move(own_); }

 private:
  Bytes& buf() { return out_ ? *out_ : own_; }

  Bytes* out_ = nullptr;
  Bytes own_;
};

/// Reads little-endian scalars; every read is bounds-checked.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    need(sizeof(T));
    U raw = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      raw |= static_cast<U>(static_cast<U>(in_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(raw);
  }

  std::span<const std::uint8_t> get_bytes(std::size_t n) {
    need(n);
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  Bytes get_blob() {
    auto n = get<std::uint32_t>();
    auto s = get_bytes(n);
    return Bytes(s.begin(), s.end());
  }

  std::string get_string() {
    auto n = get<std::uint32_t>();
    auto s = get_bytes(n);
    return std::string(s.begin(), s.end());
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

  void expect_done() const {
    if (!done()) throw DecodeError("trailing bytes after message");
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DecodeError("truncated buffer");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace ppride
