#pragma once

#include <cstdint>
#include <vector>

#include "ppride/common/bytes.hpp"
#include "ppride/knn/encrypted_index.hpp"
#include "ppride/knn/tos_secrets.hpp"
#include "ppride/trs/preference.hpp"

namespace ppride::trs {

/// One route cell: `plus` is encrypted with the driver key set and is
/// matched against rider-form indices; `minus` is encrypted with the rider
/// key set and is matched against other drivers' `plus`.
struct TrsCell {
  knn::EncryptedIndex plus;
  knn::EncryptedIndex minus;
};

struct TrsOffer {
  std::uint64_t offer_id = 0;
  std::vector<TrsCell> cells;  // in travel order
  std::uint32_t capacity = 1;
  Bytes contact_blob;
  Bytes auth_token;

  /// Throws std::invalid_argument on fewer than 2 cells, zero capacity,
  /// mixed dimensions or wrong index forms.
  void validate() const;
  std::size_t dim() const { return cells.empty() ? 0 : cells.front().plus.dim(); }

  void serialize(ByteWriter& out) const;
  static TrsOffer deserialize(ByteReader& in);
};

struct TrsRequest {
  std::uint64_t request_id = 0;
  knn::EncryptedIndex pickup;
  knn::EncryptedIndex dropoff;
  Preference preference;
  Bytes contact_blob;
  Bytes auth_token;

  void validate() const;
  std::size_t dim() const { return pickup.dim(); }

  void serialize(ByteWriter& out) const;
  static TrsRequest deserialize(ByteReader& in);
};

TrsOffer unmask_offer(const TrsOffer& offer, const knn::TosSecrets& tos);
TrsRequest unmask_request(const TrsRequest& request, const knn::TosSecrets& tos);

}  // namespace ppride::trs
