#include "ppride/tos/authority.hpp"

#include <stdexcept>
#include <string>

#include "ppride/knn/key_io.hpp"

namespace ppride::tos {

const knn::UserKeySet& KeyBundle::key(knn::Role role) const {
  for (const auto& k : keys) {
    if (k.role() == role) return k;
  }
  throw std::invalid_argument("bundle holds no " + std::string(knn::to_string(role)) + " keys");
}

void KeyBundle::serialize(ByteWriter& out) const {
  info.serialize(out);
  out.put(static_cast<std::uint8_t>(keys.size()));
  for (const auto& k : keys) knn::write_user_keys(out, k);
  out.put(static_cast<std::uint32_t>(tokens.size()));
  for (const auto& t : tokens) out.put_bytes(t);
}

KeyBundle KeyBundle::deserialize(ByteReader& in) {
  KeyBundle b;
  b.info = SystemInfo::deserialize(in);
  const auto n = in.get<std::uint8_t>();
  for (std::uint8_t i = 0; i < n; ++i) b.keys.push_back(knn::read_user_keys(in));
  const auto t = in.get<std::uint32_t>();
  if (t > in.remaining() / 32) throw DecodeError("token count exceeds payload");
  for (std::uint32_t i = 0; i < t; ++i) {
    Token tok;
    auto s = in.get_bytes(tok.size());
    std::copy(s.begin(), s.end(), tok.begin());
    b.tokens.push_back(tok);
  }
  return b;
}

void AuthorityConfig::validate() const {
  params.validate();
  if (alpha == 0 || alpha > params.m) throw std::invalid_argument("alpha must be in [1, m]");
  if (time_slots == 0 || time_slots > params.m) throw std::invalid_argument("NRS time slots must fit in m");
  if (max_items == 0) throw std::invalid_argument("max_items must be >= 1");
}

TrustedAuthority::TrustedAuthority(AuthorityConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  config_.validate();
  info_.epoch = 1;
  info_.salt = rng_();
  info_.m = static_cast<std::uint32_t>(config_.params.m);
  info_.alpha = config_.alpha;
  info_.max_items = config_.max_items;
  info_.time_slots = config_.time_slots;
  info_.k = static_cast<std::uint32_t>(config_.params.k);
  info_.ell = static_cast<std::uint32_t>(config_.params.ell);
  regenerate_keys();
}

void TrustedAuthority::regenerate_keys() {
  master_ = std::make_unique<knn::MasterKeys>(knn::generate_master_keys(config_.params, rng_()));
  factory_ = std::make_unique<knn::KeyFactory>(*master_, config_.params.field);
}

SystemInfo TrustedAuthority::info() const {
  std::lock_guard lock(mutex_);
  return info_;
}

knn::TosSecrets TrustedAuthority::tos_secrets() const {
  std::lock_guard lock(mutex_);
  return master_->tos;
}

void TrustedAuthority::set_token_sink(TokenSink sink) {
  std::lock_guard lock(mutex_);
  sink_ = std::move(sink);
}

KeyBundle TrustedAuthority::register_user(knn::Role role, std::uint64_t epoch) {
  std::unique_lock lock(mutex_);
  if (epoch != info_.epoch) {
    throw ServiceError(ErrorCode::StaleEpoch, "registration for epoch " + std::to_string(epoch) +
                                                  ", current is " + std::to_string(info_.epoch));
  }
  KeyBundle b;
  b.info = info_;
  b.keys.push_back(factory_->derive(role, rng_()));
  // a TRS driver also encrypts every route cell in rider form
  if (role == knn::Role::DriverTrs) b.keys.push_back(factory_->derive(knn::Role::RiderTrs, rng_()));
  b.tokens.resize(config_.tokens_per_bundle);
  for (auto& t : b.tokens) {
    for (std::size_t i = 0; i < t.size(); i += 8) {
      const auto word = rng_();
      for (std::size_t j = 0; j < 8; ++j) t[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
    }
  }
  auto sink = sink_;
  lock.unlock();
  if (sink) sink(b.tokens);
  return b;
}

SystemInfo TrustedAuthority::rotate_epoch() {
  std::lock_guard lock(mutex_);
  ++info_.epoch;
  info_.salt = rng_();
  info_.keys_rotated = config_.rotate_keys;
  if (config_.rotate_keys) regenerate_keys();
  return info_;
}

Envelope TrustedAuthority::handle(const Envelope& env) {
  const auto epoch = info().epoch;
  if (env.type != MsgType::RegisterUser) {
    return make_error(ErrorCode::UnknownType, "authority only serves registrations", epoch);
  }
  try {
    ByteReader r(env.payload);
    const auto role = knn::role_from_byte(r.get<std::uint8_t>());
    r.expect_done();
    auto bundle = register_user(role, env.epoch);
    ByteWriter w;
    bundle.serialize(w);
    return Envelope{MsgType::KeyBundle, bundle.info.epoch, {}, w.take()};
  } catch (const ServiceError& e) {
    return make_error(e.code(), e.what(), epoch);
  } catch (const DecodeError& e) {
    return make_error(ErrorCode::BadPayload, e.what(), epoch);
  } catch (const std::invalid_argument& e) {
    return make_error(ErrorCode::BadPayload, e.what(), epoch);
  }
}

}  // namespace ppride::tos
