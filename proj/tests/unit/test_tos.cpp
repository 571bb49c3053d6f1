#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "ppride/bloom/bloom_filter.hpp"
#include "ppride/bloom/cell.hpp"
#include "ppride/nrs/trip_builder.hpp"
#include "ppride/tos/client.hpp"
#include "ppride/tos/config.hpp"
#include "ppride/tos/service.hpp"
#include "ppride/tos/transport.hpp"

using namespace ppride;
using namespace ppride::tos;
using knn::Role;
using knn::Scheme;

namespace {

AuthorityConfig small_config(bool rotate_keys = false) {
  AuthorityConfig c;
  const auto s = bloom::sizing(20, 0.01);
  c.params.m = s.m;
  c.params.k = 4;
  c.params.ell = 4;
  c.alpha = static_cast<std::uint32_t>(s.alpha);
  c.max_items = 20;
  c.rotate_keys = rotate_keys;
  return c;
}

/// Loopback that remembers the last request it carried.
struct Recorder {
  RideService& service;
  Envelope last;
  LoopbackTransport transport{[this](const Envelope& e) {
    last = e;
    return service.handle(e);
  }};
  explicit Recorder(RideService& s) : service(s) {}
};

constexpr std::uint32_t kMorning = 8 * 3600;

std::vector<Waypoint> timed(std::initializer_list<std::uint32_t> cells) {
  std::vector<Waypoint> out;
  for (auto c : cells) out.push_back({c, kMorning});
  return out;
}

// Driver 1 meets drivers 2 and 3 in cell 2; drivers 2 and 3 also share 5 and 9.
struct Scenario {
  std::uint64_t d1, d2, d3, rider;
  std::vector<MatchResult> round;
};

Scenario run_scenario(Transport& t, const trs::Preference& pref) {
  RideClient a(t, Role::DriverTrs, 11), b(t, Role::DriverTrs, 12), c(t, Role::DriverTrs, 13);
  RideClient r(t, Role::RiderTrs, 14);
  Scenario s;
  s.d1 = a.offer_trs(timed({0, 1, 2, 3}), 1, {'d', '1'});
  s.d2 = b.offer_trs(timed({2, 5, 6, 9}), 1, {'d', '2'});
  s.d3 = c.offer_trs(timed({2, 5, 7, 8, 9}), 1, {'d', '3'});
  s.rider = r.request_trs({0, kMorning}, {9, kMorning}, pref, {'r'});
  s.round = r.run_matching(Scheme::Trs);
  return s;
}

std::vector<trs::NodeId> driver2_path(const Scenario& s) {
  return {{s.d1, 0}, {s.d1, 1}, {s.d1, 2}, {s.d2, 0}, {s.d2, 1}, {s.d2, 2}, {s.d2, 3}};
}

}  // namespace

TEST_CASE("frames round-trip and reject damage") {
  Envelope e{MsgType::SubmitOffer, 7, {}, {1, 2, 3}};
  e.token[0] = 9;
  auto f = encode_frame(e);
  CHECK(f.size() == 4 + kHeaderSize + 3);
  auto d = decode_frame(f);
  CHECK(d.type == e.type);
  CHECK(d.epoch == 7);
  CHECK(d.token == e.token);
  CHECK(d.payload == e.payload);
  CHECK(has_token(d));

  auto shortened = f;
  shortened.pop_back();
  CHECK_THROWS_AS(decode_frame(shortened), DecodeError);
  auto bad_type = f;
  bad_type[4] = 42;
  CHECK_THROWS_AS(decode_frame(bad_type), DecodeError);
  auto tiny = f;
  tiny[0] = 3;
  CHECK_THROWS_AS(decode_frame(tiny), DecodeError);
}

TEST_CASE("config files") {
  std::istringstream in("# demo\nport = 9000\nm=0\nmax_items=20\nfpp=0.01\nrotate_keys=yes\nk=4\nell=4\n");
  auto c = parse_config(in);
  CHECK(c.port == 9000);
  CHECK(c.rotate_keys);
  auto a = c.authority();
  CHECK(a.params.m == 192);
  CHECK(a.alpha == 7);

  std::ostringstream out;
  write_config(out, c);
  std::istringstream back(out.str());
  auto c2 = parse_config(back);
  CHECK(c2.port == c.port);
  CHECK(c2.k == c.k);
  CHECK(c2.fpp == c.fpp);

  std::istringstream unknown("colour=blue\n");
  CHECK_THROWS_AS(parse_config(unknown), std::invalid_argument);
  std::istringstream no_eq("port 9000\n");
  CHECK_THROWS_AS(parse_config(no_eq), std::invalid_argument);
  std::istringstream bad_num("port=70000\n");
  CHECK_THROWS_AS(parse_config(bad_num), std::invalid_argument);
  std::istringstream bad_fpp("fpp=1.5\n");
  CHECK_THROWS_AS(parse_config(bad_fpp), std::invalid_argument);
}

TEST_CASE("three drivers and one rider over loopback") {
  RideService service(small_config(), 5);
  LoopbackTransport t([&](const Envelope& e) { return service.handle(e); });
  auto s = run_scenario(t, trs::Preference::min_ct());

  REQUIRE(s.round.size() == 1);
  const auto& m = s.round[0];
  CHECK(m.matched);
  CHECK(m.request_id == s.rider);
  CHECK(m.path == driver2_path(s));
  CHECK(m.cell_count == 6);
  CHECK(m.transfer_count == 1);
  CHECK(m.offer_ids == std::vector<std::uint64_t>{s.d1, s.d2});
  CHECK(m.transfer_cells.size() == 1);
  CHECK(m.rider_contact == Bytes{'r'});
  CHECK(m.driver_contacts == std::vector<Bytes>{{'d', '1'}, {'d', '2'}});
  CHECK(t.bytes_sent() > 0);
  CHECK(t.bytes_received() > 0);

  // both drivers of the ride are told, the third is not
  auto& org = service.organizer();
  CHECK(org.pending_requests(Scheme::Trs) == 0);
  CHECK(org.pending_offers(Scheme::Trs) == 1);  // capacity 1: drivers 1 and 2 are used up
}

TEST_CASE("min_t over the wire picks the shorter of the two one-transfer rides") {
  RideService service(small_config(), 6);
  LoopbackTransport t([&](const Envelope& e) { return service.handle(e); });
  auto s = run_scenario(t, trs::Preference::min_t());
  REQUIRE(s.round.size() == 1);
  CHECK(s.round[0].path == driver2_path(s));
}

TEST_CASE("notifications reach each party once and need the submission token") {
  RideService service(small_config(), 7);
  LoopbackTransport t([&](const Envelope& e) { return service.handle(e); });
  RideClient a(t, Role::DriverTrs, 1), b(t, Role::DriverTrs, 2), r(t, Role::RiderTrs, 3);
  const auto d1 = a.offer_trs(timed({0, 1, 2}), 2);
  const auto d2 = b.offer_trs(timed({2, 5, 9}), 2);
  const auto q = r.request_trs({0, kMorning}, {9, kMorning}, trs::Preference::min_c());
  r.run_matching(Scheme::Trs);

  auto mine = r.poll(q);
  REQUIRE(mine.size() == 1);
  CHECK(mine[0].matched);
  CHECK(a.poll(d1).size() == 1);
  CHECK(b.poll(d2).size() == 1);
  CHECK(a.poll(d1).empty());

  // someone else's id with one's own token is refused
  ByteWriter w;
  w.put(d1);
  auto reply = service.handle(Envelope{MsgType::PollNotifications, 1, r.bundle().tokens.front(), w.take()});
  CHECK_THROWS_AS(expect_type(reply, MsgType::MatchNotification), ServiceError);
}

TEST_CASE("unmatched requests get a negative notification and are dropped") {
  RideService service(small_config(), 8);
  LoopbackTransport t([&](const Envelope& e) { return service.handle(e); });
  RideClient a(t, Role::DriverTrs, 1), r(t, Role::RiderTrs, 2);
  a.offer_trs(timed({0, 1, 2}), 1);
  const auto q = r.request_trs({4, kMorning}, {9, kMorning}, trs::Preference::min_c());
  auto round = r.run_matching(Scheme::Trs);
  REQUIRE(round.size() == 1);
  CHECK_FALSE(round[0].matched);
  auto note = r.poll(q);
  REQUIRE(note.size() == 1);
  CHECK_FALSE(note[0].matched);
  CHECK(service.organizer().pending_requests(Scheme::Trs) == 0);
  CHECK(service.organizer().pending_offers(Scheme::Trs) == 1);
}

TEST_CASE("the scenario also runs over TCP") {
  RideService service(small_config(), 5);
  TcpServer server([&](const Envelope& e) { return service.handle(e); });
  TcpTransport t("127.0.0.1", server.port());
  auto s = run_scenario(t, trs::Preference::min_ct());
  REQUIRE(s.round.size() == 1);
  CHECK(s.round[0].path == driver2_path(s));
  server.stop();
}

TEST_CASE("TCP server answers a bad frame with BadFrame") {
  RideService service(small_config(), 5);
  TcpServer server([&](const Envelope& e) { return service.handle(e); });
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(server.port());
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  const std::uint8_t junk[] = {2, 0, 0, 0, 0xff, 0xff};  // body shorter than a header
  REQUIRE(::send(fd, junk, sizeof junk, 0) == static_cast<ssize_t>(sizeof junk));
  Bytes reply;
  std::uint8_t buf[512];
  for (ssize_t n; (n = ::recv(fd, buf, sizeof buf, 0)) > 0;) reply.insert(reply.end(), buf, buf + n);
  ::close(fd);
  auto env = decode_frame(reply);
  REQUIRE(env.type == MsgType::Error);
  ByteReader r(env.payload);
  CHECK(ErrorMsg::deserialize(r).code == ErrorCode::BadFrame);

  // the server keeps serving other connections
  TcpTransport t("127.0.0.1", server.port());
  CHECK(t.call(Envelope{MsgType::EpochAnnounce, 0, {}, {}}).type == MsgType::EpochAnnounce);
  server.stop();
}

TEST_CASE("NRS round over the wire keeps leftover seats") {
  RideService service(small_config(), 9);
  LoopbackTransport t([&](const Envelope& e) { return service.handle(e); });
  RideClient d(t, Role::DriverNrs, 1), r1(t, Role::RiderNrs, 2), r2(t, Role::RiderNrs, 3);
  const auto offer = d.offer_nrs({0, 1}, {8, 9}, {0, 1, 4, 8, 9}, kMorning, 2,
                                 {nrs::RideCase::MpMd}, {'d'});
  const auto q1 = r1.request_nrs(1, 9, {1, 5, 9}, kMorning);
  auto round = r1.run_matching(Scheme::Nrs);
  REQUIRE(round.size() == 1);
  CHECK(round[0].matched);
  CHECK(round[0].ride_case == nrs::RideCase::MpMd);
  CHECK(round[0].offer_ids == std::vector<std::uint64_t>{offer});
  CHECK(round[0].request_id == q1);
  CHECK(service.organizer().pending_offers(Scheme::Nrs) == 1);

  r2.request_nrs(0, 8, {0, 4, 8}, kMorning);
  round = r2.run_matching(Scheme::Nrs);
  REQUIRE(round.size() == 1);
  CHECK(round[0].matched);
  CHECK(service.organizer().pending_offers(Scheme::Nrs) == 0);
  CHECK(d.poll(offer).size() == 2);

  // an evening request misses the time gate
  RideClient d2(t, Role::DriverNrs, 4);
  d2.offer_nrs({0}, {9}, {0, 9}, kMorning, 1, {nrs::RideCase::MpMd});
  r2.request_nrs(0, 9, {0, 9}, 20 * 3600);
  round = r2.run_matching(Scheme::Nrs);
  REQUIRE(round.size() == 1);
  CHECK_FALSE(round[0].matched);
}

TEST_CASE("replayed and forged tokens are rejected") {
  RideService service(small_config(), 10);
  Recorder rec(service);
  RideClient d(rec.transport, Role::DriverTrs, 1);
  d.offer_trs(timed({0, 1}), 1);
  const auto first = rec.last;
  auto replay = service.handle(first);
  REQUIRE(replay.type == MsgType::Error);
  ByteReader er(replay.payload);
  CHECK(ErrorMsg::deserialize(er).code == ErrorCode::BadToken);

  std::mt19937_64 rng(99);
  std::vector<Envelope> accepted;
  RideClient many(rec.transport, Role::DriverTrs, 2);
  for (int i = 0; i < 40; ++i) {  // crosses a bundle boundary
    many.offer_trs(timed({static_cast<std::uint32_t>(i % 16), static_cast<std::uint32_t>((i + 1) % 16)}), 1);
    accepted.push_back(rec.last);
  }
  std::size_t rejected = 0;
  for (int i = 0; i < 200; ++i) {
    auto env = accepted[rng() % accepted.size()];
    if (rng() % 2) {  // or a forged one
      for (auto& b : env.token) b = static_cast<std::uint8_t>(rng());
    }
    auto reply = service.handle(env);
    if (reply.type == MsgType::Error) {
      ByteReader r(reply.payload);
      rejected += ErrorMsg::deserialize(r).code == ErrorCode::BadToken;
    }
  }
  CHECK(rejected == 200);

  // no token at all
  auto bare = first;
  bare.token = {};
  CHECK(service.handle(bare).type == MsgType::Error);
}

TEST_CASE("stale epochs are refused and clients recover") {
  RideService service(small_config(), 11);
  Recorder rec(service);
  RideClient d(rec.transport, Role::DriverTrs, 1);
  d.offer_trs(timed({0, 1, 2}), 1);
  CHECK(service.organizer().pending_offers(Scheme::Trs) == 1);

  const auto before = service.organizer().info();
  const auto after = service.rotate_epoch();
  CHECK(after.epoch == before.epoch + 1);
  CHECK(after.salt != before.salt);
  CHECK(service.organizer().pending_offers(Scheme::Trs) == 0);

  // a hand-built message for the old epoch
  auto old = rec.last;
  old.token = d.bundle().tokens.front();
  auto reply = service.handle(old);
  REQUIRE(reply.type == MsgType::Error);
  ByteReader r(reply.payload);
  CHECK(ErrorMsg::deserialize(r).code == ErrorCode::StaleEpoch);

  // the client re-registers and retries by itself
  d.offer_trs(timed({0, 1, 2}), 1);
  CHECK(d.bundle().info.epoch == after.epoch);
  CHECK(service.organizer().pending_offers(Scheme::Trs) == 1);

  // registering for a past epoch fails
  ByteWriter w;
  w.put(static_cast<std::uint8_t>(Role::RiderNrs));
  auto reg = service.handle(Envelope{MsgType::RegisterUser, before.epoch, {}, w.take()});
  CHECK(reg.type == MsgType::Error);
}

TEST_CASE("key rotation hands the organizer new masking matrices") {
  RideService service(small_config(true), 12);
  LoopbackTransport t([&](const Envelope& e) { return service.handle(e); });
  const auto before = service.authority().tos_secrets();
  service.rotate_epoch();
  CHECK_FALSE(before.x.isApprox(service.authority().tos_secrets().x));
  auto s = run_scenario(t, trs::Preference::min_ct());
  REQUIRE(s.round.size() == 1);
  CHECK(s.round[0].path == driver2_path(s));
}

TEST_CASE("malformed submissions") {
  RideService service(small_config(), 13);
  Recorder rec(service);
  RideClient d(rec.transport, Role::DriverTrs, 1);
  d.offer_trs(timed({0, 1}), 1);
  const auto token = d.bundle().tokens.front();
  auto err = [&](Envelope e) {
    e.token = token;
    auto reply = service.handle(e);
    REQUIRE(reply.type == MsgType::Error);
    ByteReader r(reply.payload);
    return ErrorMsg::deserialize(r).code;
  };

  SUBCASE("one-cell TRS offer") {
    auto env = rec.last;
    auto offer = std::get<trs::TrsOffer>(decode_offer(env.payload));
    offer.cells.resize(1);
    env.payload = encode_offer(offer);
    CHECK(err(env) == ErrorCode::BadPayload);
  }
  SUBCASE("truncated payload") {
    auto env = rec.last;
    env.payload.resize(env.payload.size() / 2);
    CHECK(err(env) == ErrorCode::BadPayload);
  }
  SUBCASE("request type sent as an offer") {
    RideClient r(rec.transport, Role::RiderTrs, 2);
    r.request_trs({0, kMorning}, {1, kMorning}, trs::Preference::min_c());
    auto env = rec.last;
    env.type = MsgType::SubmitOffer;
    CHECK(err(env) == ErrorCode::BadPayload);
  }
  SUBCASE("wrong dimension") {
    auto cfg = small_config();
    cfg.params.k = 5;
    RideService wider(cfg, 14);
    Recorder wrec(wider);
    RideClient w(wrec.transport, Role::DriverTrs, 3);
    w.offer_trs(timed({0, 1}), 1);
    auto env = wrec.last;
    CHECK(err(env) == ErrorCode::BadPayload);
  }
  SUBCASE("unknown message for the organizer") {
    CHECK(err(Envelope{MsgType::KeyBundle, 1, {}, {}}) == ErrorCode::UnknownType);
  }
  // none of the failures spent the token
  CHECK(service.organizer().unused_tokens() > 0);
}

TEST_CASE("identifiers from another epoch do not match") {
  // the same keys in both epochs: only the identifier rotation separates them
  const auto cfg = small_config();
  const auto master = knn::generate_master_keys(cfg.params, 3);
  knn::KeyFactory f(master);
  const auto dk = f.derive(Role::DriverNrs, 4);
  const auto rk = f.derive(Role::RiderNrs, 5);
  Rng rng(6);
  const bloom::EpochKey e1{1, 111}, e2{2, 222};
  const bloom::EpochCodebook cb1(e1, cfg.params.k), cb2(e2, cfg.params.k);
  nrs::NrsEncoding enc1{cfg.params.m, cfg.alpha, cfg.max_items, 48, e1};
  nrs::NrsEncoding enc2 = enc1;
  enc2.key = e2;

  int same = 0, cross = 0;
  const int trials = 50;
  for (int i = 0; i < trials; ++i) {
    const std::uint32_t a = rng() % 16, b = rng() % 16;
    auto offer = nrs::build_offer({cb1.cell(a)}, {cb1.cell(b)}, {cb1.cell(a), cb1.cell(b)}, kMorning, 1,
                                  {nrs::RideCase::MpMd}, dk, enc1, rng);
    auto same_req = nrs::build_request(cb1.cell(a), cb1.cell(b), {cb1.cell(a), cb1.cell(b)}, kMorning, rk, enc1, rng);
    auto cross_req = nrs::build_request(cb2.cell(a), cb2.cell(b), {cb2.cell(a), cb2.cell(b)}, kMorning, rk, enc2, rng);
    same += nrs::match_pair(offer, same_req, master.tos, cfg.alpha).has_value();
    cross += nrs::match_pair(offer, cross_req, master.tos, cfg.alpha).has_value();
  }
  CHECK(same == trials);
  CHECK(cross <= 1);
}

TEST_CASE("concurrent submissions around a matching round") {
  RideService service(small_config(), 15);
  LoopbackTransport t([&](const Envelope& e) { return service.handle(e); });
  // keys derived once, up front, so threads only encrypt and submit
  std::vector<std::unique_ptr<RideClient>> drivers;
  for (int i = 0; i < 4; ++i) {
    drivers.push_back(std::make_unique<RideClient>(t, Role::DriverTrs, 100 + i));
    drivers.back()->register_user();
  }
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] {
      for (int j = 0; j < 5; ++j) {
        drivers[i]->offer_trs(timed({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(4 + j)}), 1);
        ++ok;
      }
    });
  }
  threads.emplace_back([&] { service.organizer().run_matching(Scheme::Trs); });
  for (auto& th : threads) th.join();
  CHECK(ok == 20);
  service.organizer().run_matching(Scheme::Trs);
  CHECK(service.organizer().pending_offers(Scheme::Trs) == 20);
}

TEST_CASE("server state types are free of key material and locations") {
  static_assert(!any_tainted<TripOrganizer::StateTypes>::value);
  static_assert(tainted<std::vector<bloom::CellId>>::value);
  static_assert(tainted<std::map<int, std::optional<knn::UserKeySet>>>::value);
  static_assert(tainted<std::variant<int, std::pair<bloom::EpochCodebook, int>>>::value);
  static_assert(any_tainted<type_list<int, bloom::BloomFilter>>::value);
  static_assert(!tainted<std::vector<knn::EncryptedIndex>>::value);
  CHECK(true);
}
