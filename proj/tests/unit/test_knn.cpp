#include <filesystem>
#include <random>

#include "doctest.h"
#include "plain.hpp"
#include "ppride/knn/encrypt.hpp"
#include "ppride/knn/encrypted_index.hpp"
#include "ppride/knn/key_io.hpp"
#include "ppride/knn/keys.hpp"
#include "ppride/knn/matrix.hpp"

using namespace ppride;
using namespace ppride::knn;

namespace {

constexpr double kTol = 1e-3;

bool near_identity(const Eigen::MatrixXd& a, double tol = kTol) {
  return (a - Eigen::MatrixXd::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() <= tol;
}

SchemeParams small_params() {
  SchemeParams p;
  p.m = 4;
  p.k = 3;
  p.ell = 2;
  return p;
}

double encrypted_dot(const BitVector& q, const BitVector& p, const UserKeySet& rider,
                     const UserKeySet& driver, const TosSecrets& tos, Rng& rng) {
  auto r = unmask(encrypt_index(q, rider, rng), tos);
  auto d = unmask(encrypt_index(p, driver, rng), tos);
  return match_similarity(r, d);
}

}  // namespace

TEST_CASE("master keys invert and are seed dependent") {
  const auto p = small_params();
  const auto a = generate_master_keys(p, 1);
  CHECK(p.n() == 8);
  CHECK(a.nrs.outer[0].rows() == 4);
  CHECK(a.trs.outer[0].rows() == 8);
  for (int i = 0; i < 2; ++i) {
    CHECK(near_identity(a.nrs.outer[i] * a.nrs.outer_inv[i]));
    CHECK(near_identity(a.trs.outer[i] * a.trs.outer_inv[i]));
  }
  for (int i = 0; i < 8; ++i) CHECK(near_identity(a.nrs.inner[i] * a.nrs.inner_inv[i]));
  CHECK(near_identity(a.tos.x * a.tos.x_inv));
  CHECK(near_identity(a.tos.z * a.tos.z_inv));

  const auto again = generate_master_keys(p, 1);
  CHECK(again.nrs.outer[0] == a.nrs.outer[0]);
  CHECK(again.nrs.split == a.nrs.split);
  const auto b = generate_master_keys(p, 2);
  CHECK(b.nrs.outer[0] != a.nrs.outer[0]);
}

TEST_CASE("invalid params are rejected") {
  SchemeParams p;
  p.m = 0;
  p.k = 3;
  p.ell = 2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.m = 4;
  p.ell = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.ell = 2;
  CHECK_THROWS_AS(p.validate(16), std::invalid_argument);  // 3 bits cannot address 16 cells
  CHECK_NOTHROW(p.validate(8));
  CHECK(bits_for_cells(1600) == 11);
  CHECK(bits_for_cells(15687) == 14);
}

TEST_CASE("ill-conditioned field exhausts retries") {
  NumericField f;
  f.max_condition = 1.0;  // nothing but a scaled orthogonal matrix passes
  Rng rng(3);
  CHECK_THROWS_AS(random_invertible(6, f, rng), KeyGenerationError);
}

TEST_CASE("derived key parts reproduce the master sum constraints") {
  const auto p = small_params();
  const auto mk = generate_master_keys(p, 11);
  const auto& t = mk.tos;

  SUBCASE("driver NRS") {
    auto keys = derive_user_keys(mk.nrs, t, Role::DriverNrs, 5);
    auto fac = [&](int i) -> Eigen::MatrixXd { return mk.nrs.inner[i] * t.y * keys.part(i); };
    CHECK(near_identity((fac(0) + fac(1)) * mk.nrs.outer[0]));
    CHECK(near_identity((fac(4) + fac(5)) * mk.nrs.outer[1]));
    // parts 3/4 reuse A/B
    CHECK((fac(2) - fac(0)).cwiseAbs().maxCoeff() < kTol);
    CHECK((fac(3) - fac(1)).cwiseAbs().maxCoeff() < kTol);
  }
  SUBCASE("rider NRS") {
    auto keys = derive_user_keys(mk.nrs, t, Role::RiderNrs, 6);
    auto fac = [&](int i) -> Eigen::MatrixXd { return keys.part(i) * t.x_inv * mk.nrs.inner_inv[i]; };
    CHECK(near_identity((fac(0) + fac(2)) * mk.nrs.outer_inv[0]));
    CHECK(near_identity((fac(4) + fac(6)) * mk.nrs.outer_inv[1]));
    CHECK((fac(1) - fac(0)).cwiseAbs().maxCoeff() < kTol);
  }
  SUBCASE("driver and rider TRS") {
    auto d = derive_user_keys(mk.trs, t, Role::DriverTrs, 7);
    auto r = derive_user_keys(mk.trs, t, Role::RiderTrs, 8);
    CHECK(r.dim() == p.n());
    CHECK(r.part(3).rows() == 8);
    CHECK(r.part(3).cols() == 8);
    auto dfac = [&](int i) -> Eigen::MatrixXd { return mk.trs.inner[i] * t.z * d.part(i); };
    auto rfac = [&](int i) -> Eigen::MatrixXd { return r.part(i) * t.w_inv * mk.trs.inner_inv[i]; };
    CHECK(near_identity((dfac(0) + dfac(1)) * mk.trs.outer[0]));
    CHECK(near_identity((dfac(6) + dfac(7)) * mk.trs.outer[1]));
    CHECK(near_identity((rfac(0) + rfac(2)) * mk.trs.outer_inv[0]));
    CHECK(near_identity((rfac(5) + rfac(7)) * mk.trs.outer_inv[1]));
  }
  SUBCASE("wrong scheme role") {
    CHECK_THROWS_AS(derive_user_keys(mk.nrs, t, Role::DriverTrs, 1), std::invalid_argument);
    CHECK_THROWS_AS(derive_user_keys(mk.trs, t, Role::RiderNrs, 1), std::invalid_argument);
  }
}

TEST_CASE("factory matches the direct derivation") {
  const auto mk = generate_master_keys(small_params(), 4);
  KeyFactory f(mk);
  for (auto role : {Role::DriverNrs, Role::RiderNrs, Role::DriverTrs, Role::RiderTrs}) {
    auto a = f.derive(role, 99);
    auto b = scheme_of(role) == Scheme::Nrs ? derive_user_keys(mk.nrs, mk.tos, role, 99)
                                            : derive_user_keys(mk.trs, mk.tos, role, 99);
    CHECK(a.role() == role);
    CHECK(a.split() == b.split());
    for (int i = 0; i < 8; ++i) CHECK((a.part(i) - b.part(i)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("split_vector copies and splits by party") {
  Rng rng(1);
  const BitVector v{1, 0};
  auto copy = split_vector(v, BitVector{0, 0}, Party::Driver, rng);
  CHECK(copy.first(0) == 1.0);
  CHECK(copy.first(1) == 0.0);
  CHECK(copy.second(0) == 1.0);
  CHECK(copy.second(1) == 0.0);

  auto split = split_vector(v, BitVector{1, 1}, Party::Driver, rng);
  for (int j = 0; j < 2; ++j) CHECK(split.first(j) + split.second(j) == doctest::Approx(v[j]));
  CHECK(split.first(0) != 1.0);

  // riders split where s is zero
  auto rider = split_vector(v, BitVector{1, 1}, Party::Rider, rng);
  CHECK(rider.first(0) == 1.0);
  CHECK(rider.second(0) == 1.0);
  auto rider_split = split_vector(v, BitVector{0, 0}, Party::Rider, rng);
  CHECK(rider_split.first(0) + rider_split.second(0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(split_vector(v, BitVector{0}, Party::Driver, rng), std::invalid_argument);
}

TEST_CASE("encrypt, unmask and match") {
  SchemeParams p;
  p.m = 48;
  p.k = 4;
  p.ell = 8;
  const auto mk = generate_master_keys(p, 21);
  KeyFactory f(mk);
  const auto driver = f.derive(Role::DriverNrs, 1);
  const auto rider = f.derive(Role::RiderNrs, 2);
  Rng rng(5);

  SUBCASE("zero vector scores zero") {
    BitVector zero(p.m, 0);
    auto q = oracle::random_bits(p.m, rng);
    CHECK(std::abs(encrypted_dot(q, zero, rider, driver, mk.tos, rng)) < kTol);
  }
  SUBCASE("same time slot scores one") {
    BitVector t(p.m, 0);
    t[17] = 1;
    CHECK(encrypted_dot(t, t, rider, driver, mk.tos, rng) == doctest::Approx(1.0).epsilon(kTol));
  }
  SUBCASE("orientation is fixed by role") {
    auto d = encrypt_index(BitVector(p.m, 1), driver, rng);
    auto r = encrypt_index(BitVector(p.m, 1), rider, rng);
    CHECK(d.orientation() == Orientation::Column);
    CHECK(r.orientation() == Orientation::Row);
    CHECK_FALSE(d.unmasked());
    CHECK_THROWS_AS(encrypt_index(BitVector(p.m - 1, 1), driver, rng), std::invalid_argument);
  }
  SUBCASE("double unmask is rejected") {
    auto d = unmask(encrypt_index(BitVector(p.m, 1), driver, rng), mk.tos);
    CHECK(d.unmasked());
    CHECK_THROWS_AS(unmask(d, mk.tos), std::logic_error);
  }
  SUBCASE("matching needs both sides unmasked and opposite forms") {
    auto d = encrypt_index(BitVector(p.m, 1), driver, rng);
    auto r = encrypt_index(BitVector(p.m, 1), rider, rng);
    CHECK_THROWS(match_similarity(r, d));
    auto du = unmask(d, mk.tos);
    auto ru = unmask(r, mk.tos);
    CHECK_THROWS(match_similarity(du, du));
    CHECK_NOTHROW(match_similarity(ru, du));
  }
  SUBCASE("re-encryption is fresh but equivalent") {
    auto v = oracle::random_bits(p.m, rng);
    auto q = oracle::random_bits(p.m, rng);
    auto a = encrypt_index(v, driver, rng);
    auto b = encrypt_index(v, driver, rng);
    CHECK_FALSE(a.same_ciphertext(b));
    for (std::size_t i = 0; i < 8; ++i) CHECK(a.part(i) != b.part(i));
    auto r = unmask(encrypt_index(q, rider, rng), mk.tos);
    CHECK(match_similarity(r, unmask(a, mk.tos)) ==
          doctest::Approx(match_similarity(r, unmask(b, mk.tos))).epsilon(1e-6));
  }
  SUBCASE("two riders behave identically against one driver") {
    const auto rider2 = f.derive(Role::RiderNrs, 3);
    CHECK(rider2.part(0) != rider.part(0));
    auto q = oracle::random_bits(p.m, rng);
    auto pv = oracle::random_bits(p.m, rng);
    auto d = unmask(encrypt_index(pv, driver, rng), mk.tos);
    double s1 = match_similarity(unmask(encrypt_index(q, rider, rng), mk.tos), d);
    double s2 = match_similarity(unmask(encrypt_index(q, rider2, rng), mk.tos), d);
    CHECK(std::abs(s1 - s2) < kTol);
    CHECK(std::abs(s1 - oracle::dot(q, pv)) < kTol);
  }
}

TEST_CASE("property: encrypted similarity equals the plaintext dot product") {
  for (std::size_t m : {16, 64}) {
    SchemeParams p;
    p.m = m;
    p.k = 3;
    p.ell = 2;
    const auto mk = generate_master_keys(p, 100 + m);
    KeyFactory f(mk);
    std::vector<UserKeySet> drivers, riders;
    for (int u = 0; u < 3; ++u) {
      drivers.push_back(f.derive(Role::DriverNrs, 10 + u));
      riders.push_back(f.derive(Role::RiderNrs, 20 + u));
    }
    Rng rng(m);
    for (int trial = 0; trial < 1000; ++trial) {
      const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      auto q = oracle::random_bits(m, rng, density);
      auto pv = oracle::random_bits(m, rng, density);
      double s = encrypted_dot(q, pv, riders[trial % 3], drivers[(trial / 3) % 3], mk.tos, rng);
      REQUIRE(std::abs(s - oracle::dot(q, pv)) <= kTol);
    }
  }
}

TEST_CASE("argmax over drivers does not depend on the rider key set") {
  SchemeParams p;
  p.m = 32;
  p.k = 3;
  p.ell = 2;
  const auto mk = generate_master_keys(p, 8);
  KeyFactory f(mk);
  Rng rng(8);
  std::vector<EncryptedIndex> cands;
  for (int d = 0; d < 6; ++d) {
    cands.push_back(unmask(encrypt_index(oracle::random_bits(p.m, rng), f.derive(Role::DriverNrs, 50 + d), rng),
                           mk.tos));
  }
  auto q = oracle::random_bits(p.m, rng);
  auto best = [&](const UserKeySet& rk) {
    auto r = unmask(encrypt_index(q, rk, rng), mk.tos);
    std::size_t arg = 0;
    long best_score = -1;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      long s = std::lround(match_similarity(r, cands[i]));
      if (s > best_score) {
        best_score = s;
        arg = i;
      }
    }
    return arg;
  };
  const auto first = best(f.derive(Role::RiderNrs, 1));
  for (int u = 2; u < 6; ++u) CHECK(best(f.derive(Role::RiderNrs, u)) == first);
}

TEST_CASE("raw matching without unmasking disagrees with the plaintext") {
  SchemeParams p;
  p.m = 16;
  p.k = 3;
  p.ell = 2;
  int agree = 0;
  for (int t = 0; t < 100; ++t) {
    const auto mk = generate_master_keys(p, 1000 + t);
    KeyFactory f(mk);
    Rng rng(t);
    auto q = oracle::random_bits(p.m, rng);
    auto pv = oracle::random_bits(p.m, rng);
    auto r = encrypt_index(q, f.derive(Role::RiderNrs, 1), rng);
    auto d = encrypt_index(pv, f.derive(Role::DriverNrs, 2), rng);
    if (std::abs(raw_part_sum(r, d) - oracle::dot(q, pv)) <= kTol) ++agree;
  }
  CHECK(agree < 1);
}

TEST_CASE("index and key serialization round-trip") {
  const auto mk = generate_master_keys(small_params(), 31);
  KeyFactory f(mk);
  Rng rng(31);
  auto keys = f.derive(Role::RiderTrs, 77);

  ByteWriter w;
  write_user_keys(w, keys);
  ByteReader r(w.bytes());
  auto back = read_user_keys(r);
  CHECK(r.done());
  CHECK(back.role() == keys.role());
  CHECK(back.split() == keys.split());
  CHECK(back.fingerprint() == keys.fingerprint());
  for (int i = 0; i < 8; ++i) CHECK(back.part(i) == keys.part(i));

  auto idx = encrypt_index(BitVector(8, 1), keys, rng);
  ByteWriter wi;
  idx.serialize(wi);
  CHECK(wi.bytes().size() == idx.wire_size());
  ByteReader ri(wi.bytes());
  auto idx2 = EncryptedIndex::deserialize(ri);
  CHECK(idx2.same_ciphertext(idx));
  CHECK(idx2.orientation() == Orientation::Row);
  CHECK(idx2.scheme() == Scheme::Trs);

  Bytes cut(wi.bytes().begin(), wi.bytes().end() - 3);
  ByteReader rc(cut);
  CHECK_THROWS_AS(EncryptedIndex::deserialize(rc), DecodeError);

  Bytes bad = w.bytes();
  bad[0] = 'X';
  ByteReader rb(bad);
  CHECK_THROWS_AS(read_user_keys(rb), DecodeError);

  const auto dir = std::filesystem::temp_directory_path() / "ppride_knn_test";
  std::filesystem::create_directories(dir);
  save_master_keys(dir / "master.bin", mk);
  auto mk2 = load_master_keys(dir / "master.bin");
  CHECK(mk2.nrs.outer[1] == mk.nrs.outer[1]);
  CHECK(mk2.trs.split == mk.trs.split);
  CHECK((mk2.tos.w_inv - mk.tos.w_inv).cwiseAbs().maxCoeff() < 1e-9);
  save_user_keys(dir / "user.bin", keys);
  CHECK(load_user_keys(dir / "user.bin").part(5) == keys.part(5));
  std::filesystem::remove_all(dir);
}
