#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "nrs_oracle.hpp"
#include "ppride/knn/keys.hpp"
#include "ppride/nrs/nrs.hpp"
#include "ppride/nrs/trip_builder.hpp"

using namespace ppride;
using namespace ppride::nrs;
using bloom::CellId;
using knn::Role;

namespace {

struct Fixture {
  NrsEncoding enc;
  knn::MasterKeys master;
  knn::KeyFactory factory;
  Rng rng{17};

  explicit Fixture(std::size_t max_items = 20, std::uint64_t seed = 17)
      : enc(make_enc(max_items)), master(knn::generate_master_keys(params(enc), seed)), factory(master) {}

  static NrsEncoding make_enc(std::size_t max_items) {
    const auto s = bloom::sizing(max_items, 0.01);
    NrsEncoding e;
    e.m = s.m;
    e.alpha = s.alpha;
    e.max_items = max_items;
    e.key = bloom::EpochKey{1, 0xabc};
    return e;
  }
  static knn::SchemeParams params(const NrsEncoding& e) {
    knn::SchemeParams p;
    p.m = e.m;
    p.k = 4;
    p.ell = 4;
    return p;
  }

  knn::UserKeySet driver(std::uint64_t s) { return factory.derive(Role::DriverNrs, s); }
  knn::UserKeySet rider(std::uint64_t s) { return factory.derive(Role::RiderNrs, s); }
};

std::vector<CellId> cells(std::initializer_list<std::uint32_t> ids) {
  std::vector<CellId> out;
  for (auto id : ids) out.push_back(CellId{id, 1});
  return out;
}

constexpr std::uint32_t kEight = 8 * 3600;

}  // namespace

TEST_CASE("route filter from the eight-cell example") {
  Fixture f;
  const auto route = cells({7, 17, 27, 26, 25, 35, 45, 55});
  const auto trip = encode_offer(cells({7, 17}), cells({55}), route, kEight, f.enc);
  CHECK(trip.route.popcount() <= 8 * f.enc.alpha);
  for (const auto& c : route) CHECK(bloom::membership_dot(c, trip.route) == f.enc.alpha);
  CHECK(trip.time.size() == f.enc.m);
  CHECK(std::accumulate(trip.time.begin(), trip.time.end(), 0) == 1);

  auto o = build_offer(cells({7, 17}), cells({55}), route, kEight, 2, kAllCases, f.driver(1), f.enc, f.rng);
  CHECK(o.dim() == f.enc.m);
  CHECK(o.route.orientation() == knn::Orientation::Column);
}

TEST_CASE("offer and request validation") {
  Fixture f;
  auto d = f.driver(1);
  CHECK_THROWS_AS(build_offer(cells({1}), cells({2}), cells({1, 2}), kEight, 1, {}, d, f.enc, f.rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_offer(cells({1}), cells({2}), cells({1, 2}), kEight, 0, kAllCases, d, f.enc, f.rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_offer({}, cells({2}), cells({1, 2}), kEight, 1, kAllCases, d, f.enc, f.rng),
                  std::invalid_argument);
  std::vector<CellId> long_route;
  for (std::uint32_t i = 0; i < 21; ++i) long_route.push_back(CellId{i, 1});
  CHECK_THROWS_AS(build_offer(cells({1}), cells({2}), long_route, kEight, 1, kAllCases, d, f.enc, f.rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_offer(cells({1}), cells({2}), cells({1, 2}), kEight, 1, kAllCases, f.rider(2), f.enc, f.rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_offer(cells({1}), {CellId{2, 9}}, cells({1, 2}), kEight, 1, kAllCases, d, f.enc, f.rng),
                  std::invalid_argument);
}

TEST_CASE("request filters") {
  Fixture f;
  const auto t = encode_request(CellId{4, 1}, CellId{9, 1}, cells({4, 5, 9}), kEight, f.enc);
  CHECK(t.pickup.popcount() == f.enc.alpha);
  CHECK(t.dropoff.popcount() == f.enc.alpha);

  auto r = f.rider(3);
  auto a = build_request(CellId{4, 1}, CellId{4, 1}, cells({4}), kEight, r, f.enc, f.rng);
  auto b = build_request(CellId{4, 1}, CellId{4, 1}, cells({4}), kEight, r, f.enc, f.rng);
  CHECK_FALSE(a.pickup.same_ciphertext(b.pickup));
  CHECK_FALSE(a.time.same_ciphertext(b.time));

  // a degenerate trip matches any driver covering the cell
  auto o = build_offer(cells({4}), cells({4}), cells({4, 5}), kEight, 1, kAllCases, f.driver(4), f.enc, f.rng);
  auto m = match_pair(o, a, f.master.tos, f.enc.alpha);
  REQUIRE(m);
  CHECK(m->ride_case == RideCase::MpMd);
}

TEST_CASE("the three cases") {
  Fixture f;
  auto d = f.driver(1);
  auto r = f.rider(2);
  const auto route = cells({1, 2, 3, 4, 5, 6});
  auto offer = build_offer(cells({1, 2}), cells({6}), route, kEight, 3, kAllCases, d, f.enc, f.rng);

  auto md = build_request(CellId{2, 1}, CellId{6, 1}, cells({2, 3, 4, 5, 6}), kEight + 60, r, f.enc, f.rng);
  auto rd = build_request(CellId{2, 1}, CellId{4, 1}, cells({2, 3, 4}), kEight + 60, r, f.enc, f.rng);
  auto ed = build_request(CellId{1, 1}, CellId{8, 1}, cells({1, 2, 3, 4, 5, 6, 7, 8}), kEight, r, f.enc, f.rng);
  auto none = build_request(CellId{1, 1}, CellId{8, 1}, cells({1, 9, 8}), kEight, r, f.enc, f.rng);
  auto late = build_request(CellId{2, 1}, CellId{6, 1}, cells({2, 6}), kEight + 3600, r, f.enc, f.rng);
  auto far = build_request(CellId{9, 1}, CellId{6, 1}, cells({9, 6}), kEight, r, f.enc, f.rng);

  auto c = [&](const NrsRequest& q) { return match_pair(offer, q, f.master.tos, f.enc.alpha); };
  REQUIRE(c(md));
  CHECK(c(md)->ride_case == RideCase::MpMd);
  REQUIRE(c(rd));
  CHECK(c(rd)->ride_case == RideCase::MpRd);
  REQUIRE(c(ed));
  CHECK(c(ed)->ride_case == RideCase::MpEd);
  CHECK_FALSE(c(none));
  CHECK_FALSE(c(late));
  CHECK_FALSE(c(far));

  // the driver's order decides between feasible cases
  auto rd_first = build_offer(cells({1, 2}), cells({6}), route, kEight, 3, {RideCase::MpRd, RideCase::MpMd}, d,
                              f.enc, f.rng);
  CHECK(match_pair(rd_first, md, f.master.tos, f.enc.alpha)->ride_case == RideCase::MpRd);
  auto md_only = build_offer(cells({1, 2}), cells({6}), route, kEight, 3, {RideCase::MpMd}, d, f.enc, f.rng);
  CHECK_FALSE(match_pair(md_only, rd, f.master.tos, f.enc.alpha));
}

TEST_CASE("capacity and ordering in match_all") {
  Fixture f;
  auto d = f.driver(1);
  auto r = f.rider(2);
  auto offer = build_offer(cells({1}), cells({3}), cells({1, 2, 3}), kEight, 1, kAllCases, d, f.enc, f.rng);
  offer.offer_id = 100;
  std::vector<NrsRequest> reqs;
  for (std::uint64_t i = 0; i < 2; ++i) {
    reqs.push_back(build_request(CellId{1, 1}, CellId{3, 1}, cells({1, 3}), kEight, r, f.enc, f.rng));
    reqs.back().request_id = i + 1;
  }
  auto got = match_all({offer}, reqs, f.master.tos, f.enc.alpha);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == NrsMatch{100, 1, RideCase::MpMd});
  CHECK(match_all({}, reqs, f.master.tos, f.enc.alpha).empty());

  auto second = offer;
  second.offer_id = 200;
  got = match_all({offer, second}, reqs, f.master.tos, f.enc.alpha);
  REQUIRE(got.size() == 2);
  CHECK(got[1].offer_id == 200);
}

TEST_CASE("rebuilt offers give identical outcomes") {
  Fixture f;
  auto d = f.driver(1);
  auto r = f.rider(2);
  auto build = [&] {
    auto o = build_offer(cells({1, 2}), cells({5}), cells({1, 2, 3, 4, 5}), kEight, 2, kAllCases, d, f.enc, f.rng);
    o.offer_id = 1;
    return o;
  };
  auto a = build();
  auto b = build();
  CHECK_FALSE(a.pickup.same_ciphertext(b.pickup));
  std::vector<NrsRequest> reqs;
  const std::uint32_t ends[][2] = {{1, 5}, {2, 3}, {7, 5}, {1, 9}};
  for (auto [p, q] : ends) {
    reqs.push_back(build_request(CellId{p, 1}, CellId{q, 1}, cells({p, q}), kEight, r, f.enc, f.rng));
    reqs.back().request_id = reqs.size();
  }
  CHECK(match_all({a}, reqs, f.master.tos, f.enc.alpha) == match_all({b}, reqs, f.master.tos, f.enc.alpha));
}

TEST_CASE("property: encrypted match_all equals the raw-filter oracle") {
  Fixture f(12, 5);
  std::mt19937_64 gen(99);
  std::vector<knn::UserKeySet> drivers, riders;
  for (int i = 0; i < 3; ++i) {
    drivers.push_back(f.driver(10 + i));
    riders.push_back(f.rider(20 + i));
  }
  std::size_t matched = 0;
  for (int round = 0; round < 4; ++round) {
    // small id space so random trips collide often
    auto pick = [&](std::size_t n) {
      std::set<std::uint32_t> s;
      while (s.size() < n) s.insert(gen() % 30);
      return s;
    };
    auto to_cells = [](const std::set<std::uint32_t>& s) {
      std::vector<CellId> v;
      for (auto x : s) v.push_back(CellId{x, 1});
      return v;
    };
    std::vector<NrsOffer> offers;
    std::vector<oracle::PlainOffer> plain_offers;
    std::vector<oracle::BitsTrip> offer_bits;
    for (std::uint64_t o = 0; o < 8; ++o) {
      const auto pu = pick(2), dr = pick(1), ro = pick(10);
      const std::uint32_t t = kEight + static_cast<std::uint32_t>(gen() % 3600);
      const std::uint32_t cap = 1 + gen() % 2;
      auto trip = encode_offer(to_cells(pu), to_cells(dr), to_cells(ro), t, f.enc);
      auto offer = encrypt_offer(trip, cap, kAllCases, drivers[o % 3], f.rng);
      offer.offer_id = o + 1;
      offers.push_back(offer);
      plain_offers.push_back({o + 1, cap, {oracle::Case::MpMd, oracle::Case::MpRd, oracle::Case::MpEd}});
      offer_bits.push_back({trip.pickup.bits(), trip.dropoff.bits(), trip.route.bits(), trip.time});
    }
    std::vector<NrsRequest> reqs;
    std::vector<std::uint64_t> ids;
    std::vector<oracle::BitsTrip> req_bits;
    for (std::uint64_t q = 0; q < 15; ++q) {
      const auto pu = pick(1), dr = pick(1), ro = pick(6);
      const std::uint32_t t = kEight + static_cast<std::uint32_t>(gen() % 3600);
      auto trip = encode_request(CellId{*pu.begin(), 1}, CellId{*dr.begin(), 1}, to_cells(ro), t, f.enc);
      auto r = encrypt_request(trip, riders[q % 3], f.rng);
      r.request_id = q + 1;
      reqs.push_back(r);
      ids.push_back(q + 1);
      req_bits.push_back({trip.pickup.bits(), trip.dropoff.bits(), trip.route.bits(), trip.time});
    }
    const long alpha = static_cast<long>(f.enc.alpha);
    auto want = oracle::greedy(plain_offers, offer_bits, ids, req_bits,
                               [&](const auto& d, const auto& cs, const auto& r) { return oracle::gate_bits(d, cs, r, alpha); });
    auto got = match_all(offers, reqs, f.master.tos, f.enc.alpha);
    REQUIRE(got.size() == want.size());
    matched += got.size();
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].offer_id == want[i].offer_id);
      CHECK(got[i].request_id == want[i].request_id);
      CHECK(static_cast<int>(got[i].ride_case) == static_cast<int>(want[i].c));
    }
  }
  CHECK(matched >= 4);
}

TEST_CASE("offer and request serialization") {
  Fixture f;
  auto o = build_offer(cells({1}), cells({2}), cells({1, 2}), kEight, 4, {RideCase::MpEd, RideCase::MpMd},
                       f.driver(1), f.enc, f.rng);
  o.offer_id = 77;
  o.contact_blob = {9, 9};
  o.auth_token = Bytes(32, 7);
  ByteWriter w;
  o.serialize(w);
  ByteReader r(w.bytes());
  auto back = NrsOffer::deserialize(r);
  CHECK(r.done());
  CHECK(back.offer_id == 77);
  CHECK(back.capacity == 4);
  CHECK(back.accepted_cases == o.accepted_cases);
  CHECK(back.auth_token == o.auth_token);
  CHECK(back.time.same_ciphertext(o.time));

  auto q = build_request(CellId{1, 1}, CellId{2, 1}, cells({1, 2}), kEight, f.rider(2), f.enc, f.rng);
  ByteWriter wq;
  q.serialize(wq);
  ByteReader rq(wq.bytes());
  CHECK(NrsRequest::deserialize(rq).route.same_ciphertext(q.route));
}
