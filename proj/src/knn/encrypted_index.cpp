#include "ppride/knn/encrypted_index.hpp"

#include <stdexcept>
#include <string>

namespace ppride::knn {

EncryptedIndex::EncryptedIndex(Scheme scheme, Orientation orientation, Parts parts, bool unmasked)
    : scheme_(scheme), orientation_(orientation), parts_(std::move(parts)), unmasked_(unmasked) {
  for (const auto& p : parts_) {
    if (p.size() != parts_[0].size()) {
      throw std::invalid_argument("encrypted index parts differ in length");
    }
  }
}

bool EncryptedIndex::same_ciphertext(const EncryptedIndex& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t i = 0; i < kParts; ++i) {
    if (parts_[i] != other.parts_[i]) return false;
  }
  return true;
}

void EncryptedIndex::serialize(ByteWriter& out) const {
  out.put(static_cast<std::uint8_t>(scheme_));
  out.put(static_cast<std::uint8_t>(orientation_));
  out.put(static_cast<std::uint8_t>(unmasked_ ? 1 : 0));
  out.put(static_cast<std::uint32_t>(dim()));
  for (const auto& p : parts_) {
    for (Eigen::Index j = 0; j < p.size(); ++j) out.put(p[j]);
  }
}

EncryptedIndex EncryptedIndex::deserialize(ByteReader& in) {
  const auto scheme = in.get<std::uint8_t>();
  const auto orientation = in.get<std::uint8_t>();
  const auto unmasked = in.get<std::uint8_t>();
  const auto dim = in.get<std::uint32_t>();
  if (scheme > 1 || orientation > 1 || unmasked > 1) throw DecodeError("bad index header");
  if (in.remaining() < kParts * static_cast<std::size_t>(dim) * sizeof(double)) {
    throw DecodeError("truncated index");
  }
  Parts parts;
  for (auto& p : parts) {
    p.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) p[j] = in.get<double>();
  }
  return EncryptedIndex(static_cast<Scheme>(scheme), static_cast<Orientation>(orientation),
                        std::move(parts), unmasked == 1);
}

EncryptedIndex unmask(const EncryptedIndex& index, const TosSecrets& tos) {
  if (index.unmasked()) throw std::logic_error("index is already unmasked");
  const bool nrs = index.scheme() == Scheme::Nrs;
  const bool column = index.orientation() == Orientation::Column;
  const Eigen::MatrixXd& mask = nrs ? (column ? tos.y : tos.x_inv) : (column ? tos.z : tos.w_inv);
  if (static_cast<std::size_t>(mask.rows()) != index.dim()) {
    throw std::invalid_argument("index length " + std::to_string(index.dim()) +
                                " does not match server secret size " +
                                std::to_string(mask.rows()));
  }
  EncryptedIndex::Parts out;
  for (std::size_t i = 0; i < EncryptedIndex::kParts; ++i) {
    // column: Y * part; row: part * X^-1, kept as a column vector
    out[i] = column ? Eigen::VectorXd(mask * index.part(i))
                    : Eigen::VectorXd(mask.transpose() * index.part(i));
  }
  return EncryptedIndex(index.scheme(), index.orientation(), std::move(out), true);
}

double raw_part_sum(const EncryptedIndex& rider, const EncryptedIndex& driver) {
  if (rider.orientation() != Orientation::Row || driver.orientation() != Orientation::Column) {
    throw std::invalid_argument("similarity needs a row-form rider index and a column-form driver index");
  }
  if (rider.dim() != driver.dim()) {
    throw std::invalid_argument("index lengths differ: " + std::to_string(rider.dim()) + " vs " +
                                std::to_string(driver.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < EncryptedIndex::kParts; ++i) sum += rider.part(i).dot(driver.part(i));
  return sum;
}

double match_similarity(const EncryptedIndex& rider, const EncryptedIndex& driver) {
  if (!rider.unmasked() || !driver.unmasked()) {
    throw std::logic_error("similarity requires unmasked indices");
  }
  return raw_part_sum(rider, driver);
}

}  // namespace ppride::knn
