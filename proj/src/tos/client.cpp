#include "ppride/tos/client.hpp"

#include <string>

#include "ppride/nrs/trip_builder.hpp"
#include "ppride/trs/trip_builder.hpp"

namespace ppride::tos {

RideClient::RideClient(Transport& transport, knn::Role role, std::uint64_t seed)
    : transport_(transport), role_(role), rng_(seed) {}

SystemInfo RideClient::fetch_info() {
  auto reply = transport_.call(Envelope{MsgType::EpochAnnounce, 0, {}, {}});
  expect_type(reply, MsgType::EpochAnnounce);
  ByteReader r(reply.payload);
  auto info = SystemInfo::deserialize(r);
  r.expect_done();
  return info;
}

const KeyBundle& RideClient::register_user() {
  const auto info = fetch_info();
  ByteWriter w;
  w.put(static_cast<std::uint8_t>(role_));
  auto reply = transport_.call(Envelope{MsgType::RegisterUser, info.epoch, {}, w.take()});
  expect_type(reply, MsgType::KeyBundle);
  ByteReader r(reply.payload);
  auto bundle = KeyBundle::deserialize(r);
  r.expect_done();
  if (!codebook_ || codebook_->key() != bloom::EpochKey{bundle.info.epoch, bundle.info.salt}) {
    codebook_ = std::make_unique<bloom::EpochCodebook>(
        bloom::EpochKey{bundle.info.epoch, bundle.info.salt}, bundle.info.k);
  }
  bundle_ = std::move(bundle);
  return *bundle_;
}

const KeyBundle& RideClient::bundle() const {
  if (!bundle_) throw std::logic_error("client is not registered");
  return *bundle_;
}

void RideClient::require_role(knn::Role want) const {
  if (role_ != want) {
    throw std::logic_error("a " + std::string(knn::to_string(role_)) + " client cannot act as " +
                           std::string(knn::to_string(want)));
  }
}

bloom::CellId RideClient::cell(std::uint32_t physical) const { return codebook_->cell(physical); }

Token RideClient::next_token() {
  if (!bundle_ || bundle_->tokens.empty()) register_user();
  const auto t = bundle_->tokens.back();
  bundle_->tokens.pop_back();
  return t;
}

std::uint64_t RideClient::submit(MsgType type, const std::function<Bytes()>& build) {
  if (!bundle_) register_user();
  for (int attempt = 0;; ++attempt) {
    const auto token = next_token();
    auto reply = transport_.call(Envelope{type, bundle_->info.epoch, token, build()});
    try {
      const auto id = read_ack(reply);
      owned_[id] = token;
      return id;
    } catch (const ServiceError& e) {
      if (e.code() != ErrorCode::StaleEpoch || attempt > 0) throw;
      register_user();
    }
  }
}

std::uint64_t RideClient::offer_nrs(const std::vector<std::uint32_t>& pickup_area,
                                    const std::vector<std::uint32_t>& dropoff_area,
                                    const std::vector<std::uint32_t>& route, std::uint32_t depart_time,
                                    std::uint32_t capacity, std::vector<nrs::RideCase> cases, Bytes contact) {
  require_role(knn::Role::DriverNrs);
  return submit(MsgType::SubmitOffer, [&] {
    const auto& info = bundle_->info;
    const nrs::NrsEncoding enc{info.m, info.alpha, info.max_items, info.time_slots, {info.epoch, info.salt}};
    auto ids = [&](const std::vector<std::uint32_t>& cells) {
      std::vector<bloom::CellId> out;
      for (auto c : cells) out.push_back(cell(c));
      return out;
    };
    auto offer = nrs::build_offer(ids(pickup_area), ids(dropoff_area), ids(route), depart_time, capacity,
                                  cases, bundle_->key(knn::Role::DriverNrs), enc, rng_);
    offer.contact_blob = contact;
    return encode_offer(offer);
  });
}

std::uint64_t RideClient::request_nrs(std::uint32_t pickup, std::uint32_t dropoff,
                                      const std::vector<std::uint32_t>& route, std::uint32_t depart_time,
                                      Bytes contact) {
  require_role(knn::Role::RiderNrs);
  return submit(MsgType::SubmitRequest, [&] {
    const auto& info = bundle_->info;
    const nrs::NrsEncoding enc{info.m, info.alpha, info.max_items, info.time_slots, {info.epoch, info.salt}};
    std::vector<bloom::CellId> route_ids;
    for (auto c : route) route_ids.push_back(cell(c));
    auto req = nrs::build_request(cell(pickup), cell(dropoff), route_ids, depart_time,
                                  bundle_->key(knn::Role::RiderNrs), enc, rng_);
    req.contact_blob = contact;
    return encode_request(req);
  });
}

std::uint64_t RideClient::offer_trs(const std::vector<Waypoint>& route, std::uint32_t capacity, Bytes contact) {
  require_role(knn::Role::DriverTrs);
  return submit(MsgType::SubmitOffer, [&] {
    const auto& info = bundle_->info;
    const knn::SchemeParams params{info.m, info.k, info.ell, {}};
    std::vector<trs::TimedCell> cells;
    for (const auto& w : route) cells.push_back({cell(w.cell), w.time});
    auto offer = trs::build_offer(cells, capacity, bundle_->key(knn::Role::DriverTrs),
                                  bundle_->key(knn::Role::RiderTrs), params, rng_);
    offer.contact_blob = contact;
    return encode_offer(offer);
  });
}

std::uint64_t RideClient::request_trs(Waypoint pickup, Waypoint dropoff, const trs::Preference& preference,
                                      Bytes contact) {
  require_role(knn::Role::RiderTrs);
  return submit(MsgType::SubmitRequest, [&] {
    const auto& info = bundle_->info;
    const knn::SchemeParams params{info.m, info.k, info.ell, {}};
    auto req = trs::build_request({cell(pickup.cell), pickup.time}, {cell(dropoff.cell), dropoff.time},
                                  preference, bundle_->key(knn::Role::RiderTrs), params, rng_);
    req.contact_blob = contact;
    return encode_request(req);
  });
}

std::vector<MatchResult> RideClient::poll(std::uint64_t submission_id) {
  auto it = owned_.find(submission_id);
  if (it == owned_.end()) throw std::invalid_argument("not our submission: " + std::to_string(submission_id));
  ByteWriter w;
  w.put(submission_id);
  auto reply = transport_.call(Envelope{MsgType::PollNotifications, bundle().info.epoch, it->second, w.take()});
  expect_type(reply, MsgType::MatchNotification);
  return decode_matches(reply.payload);
}

std::vector<MatchResult> RideClient::run_matching(knn::Scheme scheme) {
  ByteWriter w;
  w.put(static_cast<std::uint8_t>(scheme));
  auto reply = transport_.call(Envelope{MsgType::RunMatching, 0, {}, w.take()});
  expect_type(reply, MsgType::MatchNotification);
  return decode_matches(reply.payload);
}

}  // namespace ppride::tos
