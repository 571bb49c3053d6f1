#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "ppride/knn/keys.hpp"
#include "ppride/tos/protocol.hpp"
#include "ppride/tos/wire.hpp"

namespace ppride::tos {

/// What a registering user receives: the epoch parameters, one key set (two
/// for a TRS driver: driver keys then rider keys) and single-use tokens.
struct KeyBundle {
  SystemInfo info;
  std::vector<knn::UserKeySet> keys;
  std::vector<Token> tokens;

  const knn::UserKeySet& key(knn::Role role) const;

  void serialize(ByteWriter& out) const;
  static KeyBundle deserialize(ByteReader& in);
};

struct AuthorityConfig {
  knn::SchemeParams params;  // m, k, ell
  std::uint32_t alpha = 0;
  std::uint32_t max_items = 0;
  std::uint32_t time_slots = 48;
  std::size_t tokens_per_bundle = 32;
  bool rotate_keys = false;  // new master keys at every epoch

  void validate() const;
};

/// The offline key service. Holds the master keys; hands the organizer only
/// its four masking matrices and the tokens it issues.
class TrustedAuthority {
 public:
  using TokenSink = std::function<void(const std::vector<Token>&)>;

  TrustedAuthority(AuthorityConfig config, std::uint64_t seed);

  SystemInfo info() const;
  knn::TosSecrets tos_secrets() const;
  const knn::MasterKeys& master_keys() const { return *master_; }
  void set_token_sink(TokenSink sink);

  /// Throws ServiceError(StaleEpoch) when `epoch` is not the current one.
  KeyBundle register_user(knn::Role role, std::uint64_t epoch);

  /// Advances the epoch with a fresh salt, regenerating the master keys when
  /// configured. Returns the new announcement.
  SystemInfo rotate_epoch();

  /// Serves RegisterUser envelopes.
  Envelope handle(const Envelope& env);

 private:
  void regenerate_keys();

  mutable std::mutex mutex_;
  AuthorityConfig config_;
  Rng rng_;
  std::unique_ptr<knn::MasterKeys> master_;
  std::unique_ptr<knn::KeyFactory> factory_;
  SystemInfo info_;
  TokenSink sink_;
};

}  // namespace ppride::tos
