#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "ppride/common/bytes.hpp"
#include "ppride/knn/params.hpp"
#include "ppride/knn/tos_secrets.hpp"

namespace ppride::knn {

/// An 8-part ciphertext of one binary vector. Drivers produce column-form
/// indices, riders row-form; both are stored as plain vectors and the
/// orientation tag decides which side of a mask matrix they multiply.
class EncryptedIndex {
 public:
  static constexpr std::size_t kParts = 8;
  using Parts = std::array<Eigen::VectorXd, kParts>;

  EncryptedIndex() = default;
  EncryptedIndex(Scheme scheme, Orientation orientation, Parts parts, bool unmasked = false);

  Scheme scheme() const { return scheme_; }
  Orientation orientation() const { return orientation_; }
  bool unmasked() const { return unmasked_; }
  std::size_t dim() const { return static_cast<std::size_t>(parts_[0].size()); }
  const Eigen::VectorXd& part(std::size_t i) const { return parts_.at(i); }
  const Parts& parts() const { return parts_; }

  /// True when every part is bitwise identical.
  bool same_ciphertext(const EncryptedIndex& other) const;

  void serialize(ByteWriter& out) const;
  static EncryptedIndex deserialize(ByteReader& in);
  std::size_t wire_size() const { return 7 + kParts * dim() * sizeof(double); }

 private:
  Scheme scheme_ = Scheme::Nrs;
  Orientation orientation_ = Orientation::Column;
  Parts parts_{};
  bool unmasked_ = false;
};

/// Strips the server mask: driver parts are left-multiplied by Y (NRS) or Z
/// (TRS); rider parts are right-multiplied by X^-1 or W^-1.
/// Throws std::logic_error on an already-unmasked index and
/// std::invalid_argument on a dimension mismatch.
EncryptedIndex unmask(const EncryptedIndex& index, const TosSecrets& tos);

/// Sum of the eight part-wise inner products between an unmasked rider
/// (row) index and an unmasked driver (column) index. Recovers Q . P.
double match_similarity(const EncryptedIndex& rider, const EncryptedIndex& driver);

/// Same sum without the unmasked precondition. Only used to show that
/// matching fails while the server mask is still in place.
double raw_part_sum(const EncryptedIndex& rider, const EncryptedIndex& driver);

/// Integer-valued similarities are compared with this half-unit margin.
constexpr double kSimilarityMargin = 0.5;

inline bool similarity_equals(double similarity, double target) {
  return similarity > target - kSimilarityMargin && similarity < target + kSimilarityMargin;
}

}  // namespace ppride::knn
