#pragma once

// Key material held by the trusted authority and by users. The organizing
// server must never see these types; its translation units check this macro.
#define PPRIDE_USER_KEY_MATERIAL 1

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "ppride/knn/params.hpp"
#include "ppride/knn/tos_secrets.hpp"

namespace ppride::knn {

/// Master secret for one scheme: {M1, M2, N1..N8} with S_NT for NRS,
/// {V1, V2, T1..T8} with S_T for TRS. Inverses are cached at generation.
template <Scheme S>
struct MasterKey {
  static constexpr Scheme scheme = S;

  std::array<Eigen::MatrixXd, 2> outer;      // M1, M2  | V1, V2
  std::array<Eigen::MatrixXd, 2> outer_inv;
  std::array<Eigen::MatrixXd, 8> inner;      // N1..N8  | T1..T8
  std::array<Eigen::MatrixXd, 8> inner_inv;
  BitVector split;                           // S_NT    | S_T

  std::size_t dim() const { return split.size(); }
};

using MasterKeyNT = MasterKey<Scheme::Nrs>;
using MasterKeyT = MasterKey<Scheme::Trs>;

struct MasterKeys {
  MasterKeyNT nrs;
  MasterKeyT trs;
  TosSecrets tos;
};

/// Deterministic in (params, seed). Throws KeyGenerationError when a draw
/// stays ill-conditioned after the retry budget.
MasterKeys generate_master_keys(const SchemeParams& params, std::uint64_t seed);

/// One user's eight key matrices for a single role, plus the split vector
/// for that role's scheme.
class UserKeySet {
 public:
  static constexpr std::size_t kParts = 8;
  using Parts = std::array<Eigen::MatrixXd, kParts>;

  UserKeySet(Role role, Parts parts, BitVector split, std::uint64_t fingerprint);

  Role role() const { return role_; }
  std::size_t dim() const { return split_.size(); }
  const Eigen::MatrixXd& part(std::size_t i) const { return parts_.at(i); }
  const Parts& parts() const { return parts_; }
  const BitVector& split() const { return split_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  Role role_;
  Parts parts_;
  BitVector split_;
  std::uint64_t fingerprint_;
};

/// Derives a fresh key set for one user. Driver roles get
/// {Y^-1 N_i^-1 R_i} with R = (A,B,A,B,C,D,C,D), A+B = M1^-1, C+D = M2^-1;
/// rider roles get {R_i N_i X} with R = (E,E,F,F,G,G,H,H), E+F = M1, G+H = M2.
/// TRS roles use V/T/Z/W in place of M/N/Y/X.
/// Throws std::invalid_argument if the role belongs to the other scheme.
UserKeySet derive_user_keys(const MasterKeyNT& master, const TosSecrets& tos, Role role,
                            std::uint64_t seed, const NumericField& field = {});
UserKeySet derive_user_keys(const MasterKeyT& master, const TosSecrets& tos, Role role,
                            std::uint64_t seed, const NumericField& field = {});

/// Authority-side deriver that precomputes the per-part fixed factors
/// (Y^-1 N_i^-1, N_i X, Z^-1 T_i^-1, T_i W) once for all users.
class KeyFactory {
 public:
  KeyFactory(const MasterKeys& keys, NumericField field = {});

  UserKeySet derive(Role role, std::uint64_t seed) const;

 private:
  struct RoleFactors {
    std::array<Eigen::MatrixXd, 8> fixed;
    std::array<Eigen::MatrixXd, 2> sums;  // targets the random pairs add up to
    BitVector split;
  };

  const RoleFactors& factors(Role role) const;

  NumericField field_;
  std::array<RoleFactors, 4> roles_;
};

}  // namespace ppride::knn
