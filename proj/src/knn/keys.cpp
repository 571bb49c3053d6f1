#include "ppride/knn/keys.hpp"

#include <stdexcept>
#include <string>

#include "ppride/knn/matrix.hpp"

namespace ppride::knn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <Scheme S>
MasterKey<S> draw_master(std::size_t dim, const NumericField& field, Rng& rng) {
  MasterKey<S> key;
  for (std::size_t i = 0; i < 2; ++i) {
    auto d = random_invertible(dim, field, rng);
    key.outer[i] = std::move(d.matrix);
    key.outer_inv[i] = std::move(d.inverse);
  }
  for (std::size_t i = 0; i < 8; ++i) {
    auto d = random_invertible(dim, field, rng);
    key.inner[i] = std::move(d.matrix);
    key.inner_inv[i] = std::move(d.inverse);
  }
  std::bernoulli_distribution coin(0.5);
  key.split.resize(dim);
  for (auto& b : key.split) b = coin(rng) ? 1 : 0;
  return key;
}

// Random pair draws feeding the eight parts: (A,B,A,B,C,D,C,D) for drivers,
// (E,E,F,F,G,G,H,H) for riders.
constexpr std::array<int, 8> kDriverPattern = {0, 1, 0, 1, 2, 3, 2, 3};
constexpr std::array<int, 8> kRiderPattern = {0, 0, 1, 1, 2, 2, 3, 3};

UserKeySet assemble(Role role, const std::array<Eigen::MatrixXd, 8>& fixed,
                    const std::array<Eigen::MatrixXd, 2>& sums, const BitVector& split,
                    std::uint64_t seed, const NumericField& field) {
  Rng rng(seed);
  auto [r0, r1] = random_invertible_split(sums[0], field, rng);
  auto [r2, r3] = random_invertible_split(sums[1], field, rng);
  const std::array<const Eigen::MatrixXd*, 4> random = {&r0, &r1, &r2, &r3};

  const bool driver = is_driver(role);
  const auto& pattern = driver ? kDriverPattern : kRiderPattern;
  UserKeySet::Parts parts;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& r = *random[pattern[i]];
    parts[i].noalias() = driver ? fixed[i] * r : r * fixed[i];
  }
  const std::uint64_t fp = splitmix64(seed ^ (static_cast<std::uint64_t>(role) << 56));
  return UserKeySet(role, std::move(parts), split, fp);
}

// Y^-1 N_i^-1 for drivers, N_i X for riders (Z / T_i / W for TRS).
template <Scheme S>
std::array<Eigen::MatrixXd, 8> fixed_factors(const MasterKey<S>& master, const TosSecrets& tos,
                                              bool driver) {
  std::array<Eigen::MatrixXd, 8> fixed;
  const bool nrs = S == Scheme::Nrs;
  const Eigen::MatrixXd& mask = driver ? (nrs ? tos.y_inv : tos.z_inv) : (nrs ? tos.x : tos.w);
  if (static_cast<std::size_t>(mask.rows()) != master.dim()) {
    throw std::invalid_argument("server secret size does not match master key size");
  }
  for (std::size_t i = 0; i < 8; ++i) {
    fixed[i].noalias() = driver ? mask * master.inner_inv[i] : master.inner[i] * mask;
  }
  return fixed;
}

template <Scheme S>
UserKeySet derive_impl(const MasterKey<S>& master, const TosSecrets& tos, Role role,
                       std::uint64_t seed, const NumericField& field) {
  if (scheme_of(role) != S) {
    throw std::invalid_argument(std::string("role ") + std::string(to_string(role)) +
                                " does not belong to this master key's scheme");
  }
  const bool driver = is_driver(role);
  return assemble(role, fixed_factors(master, tos, driver),
                  driver ? master.outer_inv : master.outer, master.split, seed, field);
}

}  // namespace

MasterKeys generate_master_keys(const SchemeParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  MasterKeys keys;
  keys.nrs = draw_master<Scheme::Nrs>(params.m, params.field, rng);
  keys.trs = draw_master<Scheme::Trs>(params.n(), params.field, rng);
  auto x = random_invertible(params.m, params.field, rng);
  auto y = random_invertible(params.m, params.field, rng);
  auto w = random_invertible(params.n(), params.field, rng);
  auto z = random_invertible(params.n(), params.field, rng);
  keys.tos = TosSecrets{std::move(x.matrix), std::move(y.matrix), std::move(w.matrix),
                        std::move(z.matrix), std::move(x.inverse), std::move(y.inverse),
                        std::move(w.inverse), std::move(z.inverse)};
  return keys;
}

UserKeySet::UserKeySet(Role role, Parts parts, BitVector split, std::uint64_t fingerprint)
    : role_(role), parts_(std::move(parts)), split_(std::move(split)), fingerprint_(fingerprint) {
  const auto d = static_cast<Eigen::Index>(split_.size());
  for (const auto& p : parts_) {
    if (p.rows() != d || p.cols() != d) {
      throw std::invalid_argument("key part is not " + std::to_string(d) + "x" + std::to_string(d));
    }
  }
}

UserKeySet derive_user_keys(const MasterKeyNT& master, const TosSecrets& tos, Role role,
                            std::uint64_t seed, const NumericField& field) {
  return derive_impl(master, tos, role, seed, field);
}

UserKeySet derive_user_keys(const MasterKeyT& master, const TosSecrets& tos, Role role,
                            std::uint64_t seed, const NumericField& field) {
  return derive_impl(master, tos, role, seed, field);
}

KeyFactory::KeyFactory(const MasterKeys& keys, NumericField field) : field_(field) {
  auto idx = [](Role r) { return static_cast<std::size_t>(r); };
  roles_[idx(Role::DriverNrs)] = {fixed_factors(keys.nrs, keys.tos, true), keys.nrs.outer_inv,
                                  keys.nrs.split};
  roles_[idx(Role::RiderNrs)] = {fixed_factors(keys.nrs, keys.tos, false), keys.nrs.outer,
                                 keys.nrs.split};
  roles_[idx(Role::DriverTrs)] = {fixed_factors(keys.trs, keys.tos, true), keys.trs.outer_inv,
                                  keys.trs.split};
  roles_[idx(Role::RiderTrs)] = {fixed_factors(keys.trs, keys.tos, false), keys.trs.outer,
                                 keys.trs.split};
}

const KeyFactory::RoleFactors& KeyFactory::factors(Role role) const {
  return roles_.at(static_cast<std::size_t>(role));
}

UserKeySet KeyFactory::derive(Role role, std::uint64_t seed) const {
  const auto& f = factors(role);
  return assemble(role, f.fixed, f.sums, f.split, seed, field_);
}

}  // namespace ppride::knn
