#include "ppride/bloom/bloom_filter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ppride/bloom/hash.hpp"

namespace ppride::bloom {

namespace {

std::size_t hash_position(CellId cell, std::uint64_t salt, std::uint32_t i, std::uint32_t counter,
                          std::size_t m) {
  ByteWriter w;
  w.put(salt);
  w.put(cell.epoch);
  w.put(cell.id);
  w.put(i);
  w.put(counter);
  const auto h = murmur3_128(w.bytes());
  return static_cast<std::size_t>(h[0] % m);
}

}  // namespace

std::vector<std::size_t> cell_positions(CellId cell, std::size_t m, std::size_t alpha,
                                        std::uint64_t salt) {
  if (alpha == 0) throw std::invalid_argument("alpha must be >= 1");
  if (alpha > m) {
    throw std::invalid_argument("alpha=" + std::to_string(alpha) + " distinct positions impossible in m=" +
                                std::to_string(m) + " bits");
  }
  std::vector<std::size_t> out;
  out.reserve(alpha);
  for (std::uint32_t i = 0; i < alpha; ++i) {
    std::uint32_t counter = 0;
    std::size_t pos = hash_position(cell, salt, i, counter, m);
    while (std::find(out.begin(), out.end(), pos) != out.end()) {
      pos = hash_position(cell, salt, i, ++counter, m);
    }
    out.push_back(pos);
  }
  return out;
}

BloomFilter::BloomFilter(std::size_t m, std::size_t alpha, EpochKey key)
    : m_(m), alpha_(alpha), key_(key), words_((m + 63) / 64, 0) {
  if (m == 0) throw std::invalid_argument("bloom filter size must be >= 1");
  if (alpha == 0) throw std::invalid_argument("alpha must be >= 1");
  if (alpha > m) throw std::invalid_argument("alpha exceeds filter size");
}

void BloomFilter::insert(CellId cell) {
  if (cell.epoch != key_.epoch) {
    throw std::invalid_argument("cell epoch " + std::to_string(cell.epoch) +
                                " does not match filter epoch " + std::to_string(key_.epoch));
  }
  for (auto pos : cell_positions(cell, m_, alpha_, key_.salt)) words_[pos / 64] |= 1ULL << (pos % 64);
}

std::size_t BloomFilter::popcount() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitVector BloomFilter::bits() const {
  BitVector out(m_);
  for (std::size_t i = 0; i < m_; ++i) out[i] = test(i) ? 1 : 0;
  return out;
}

void BloomFilter::check_compatible(const BloomFilter& other) const {
  if (m_ != other.m_ || alpha_ != other.alpha_ || key_ != other.key_) {
    throw std::invalid_argument("bloom filter parameters differ");
  }
}

std::size_t BloomFilter::dot(const BloomFilter& other) const {
  check_compatible(other);
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
  }
  return n;
}

void BloomFilter::serialize(ByteWriter& out) const {
  out.put(static_cast<std::uint32_t>(m_));
  out.put(static_cast<std::uint32_t>(alpha_));
  out.put(key_.epoch);
  out.put(key_.salt);
  for (auto w : words_) out.put(w);
}

BloomFilter BloomFilter::deserialize(ByteReader& in) {
  const auto m = in.get<std::uint32_t>();
  const auto alpha = in.get<std::uint32_t>();
  EpochKey key;
  key.epoch = in.get<std::uint64_t>();
  key.salt = in.get<std::uint64_t>();
  if (m == 0 || alpha == 0 || alpha > m) throw DecodeError("bad bloom filter header");
  BloomFilter f(m, alpha, key);
  for (auto& w : f.words_) w = in.get<std::uint64_t>();
  if (m % 64 != 0 && (f.words_.back() >> (m % 64)) != 0) {
    throw DecodeError("bloom filter has bits beyond m");
  }
  return f;
}

BloomFilter insert_cell(BloomFilter filter, CellId cell) {
  filter.insert(cell);
  return filter;
}

BloomFilter make_filter(std::size_t m, std::size_t alpha, EpochKey key,
                        const std::vector<CellId>& cells) {
  BloomFilter f(m, alpha, key);
  for (const auto& c : cells) f.insert(c);
  return f;
}

std::size_t membership_dot(CellId query, const BloomFilter& filter) {
  BloomFilter single(filter.size(), filter.alpha(), filter.key());
  single.insert(query);
  return single.dot(filter);
}

BloomSizing sizing(std::size_t max_items, double target_fpp) {
  if (!(target_fpp > 0.0 && target_fpp < 1.0)) {
    throw std::invalid_argument("target false-positive probability must be in (0, 1)");
  }
  if (max_items == 0) throw std::invalid_argument("max_items must be >= 1");
  const double ln2 = std::log(2.0);
  const double raw = -static_cast<double>(max_items) * std::log(target_fpp) / (ln2 * ln2);
  std::size_t m = static_cast<std::size_t>(std::ceil(raw));
  m = std::max<std::size_t>(64, (m + 63) / 64 * 64);
  return {m, alpha_for(m, max_items)};
}

std::size_t alpha_for(std::size_t m, std::size_t max_items) {
  if (max_items == 0) throw std::invalid_argument("max_items must be >= 1");
  const double a = std::ceil(static_cast<double>(m) / static_cast<double>(max_items) * std::log(2.0));
  return std::clamp<std::size_t>(static_cast<std::size_t>(a), 1, m);
}

double analytic_fpp(std::size_t m, std::size_t alpha, std::size_t items) {
  const double a = static_cast<double>(alpha);
  return std::pow(1.0 - std::exp(-a * static_cast<double>(items) / static_cast<double>(m)), a);
}

}  // namespace ppride::bloom
