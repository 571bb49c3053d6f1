#include "ppride/tos/organizer.hpp"

#include <algorithm>
#include <string>

#ifdef PPRIDE_USER_KEY_MATERIAL
#error "the organizer must not see user key material"
#endif
#ifdef PPRIDE_PLAINTEXT_LOCATION
#error "the organizer must not see plaintext locations"
#endif

namespace ppride::tos {

namespace {

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + " dimension " + std::to_string(got) +
                                ", expected " + std::to_string(want));
  }
}

}  // namespace

TripOrganizer::TripOrganizer(SystemInfo info, knn::TosSecrets secrets, OrganizerConfig config)
    : info_(info), secrets_(std::move(secrets)), config_(config), graph_(info.k) {
  if (secrets_.nrs_dim() != info_.m) throw std::invalid_argument("NRS secrets do not match m");
  if (secrets_.trs_dim() != info_.n()) throw std::invalid_argument("TRS secrets do not match n");
}

SystemInfo TripOrganizer::info() const {
  std::shared_lock round(round_);
  return info_;
}

void TripOrganizer::accept_tokens(const std::vector<Token>& tokens) {
  std::lock_guard lock(state_);
  tokens_.insert(tokens.begin(), tokens.end());
}

void TripOrganizer::check_epoch(std::uint64_t epoch) const {
  if (epoch != info_.epoch) {
    throw ServiceError(ErrorCode::StaleEpoch, "message for epoch " + std::to_string(epoch) +
                                                  ", current is " + std::to_string(info_.epoch));
  }
}

void TripOrganizer::consume_token(const Token& token) {
  auto it = tokens_.find(token);
  if (it == tokens_.end()) throw ServiceError(ErrorCode::BadToken, "token unknown or already used");
  tokens_.erase(it);
}

std::uint64_t TripOrganizer::submit_offer(const OfferPayload& offer, const Token& token,
                                          std::uint64_t epoch) {
  std::shared_lock round(round_);
  check_epoch(epoch);
  // validation and unmasking are the expensive part and run unlocked
  if (const auto* o = std::get_if<nrs::NrsOffer>(&offer)) {
    o->validate();
    check_dim(o->dim(), info_.m, "NRS offer");
    NrsSlot slot{nrs::unmask_offer(*o, secrets_), o->capacity};
    std::lock_guard lock(state_);
    consume_token(token);
    const auto id = next_id_++;
    slot.offer.offer_id = id;
    owners_[id] = token;
    nrs_offers_.push_back(std::move(slot));
    return id;
  }
  const auto& o = std::get<trs::TrsOffer>(offer);
  o.validate();
  check_dim(o.dim(), info_.n(), "TRS offer");
  auto plain = trs::unmask_offer(o, secrets_);
  TrsSource source;
  source.contact = o.contact_blob;
  for (const auto& c : o.cells) source.masked_plus.push_back(c.plus);
  std::lock_guard lock(state_);
  consume_token(token);
  const auto id = next_id_++;
  plain.offer_id = id;
  owners_[id] = token;
  trs_sources_.emplace(id, std::move(source));
  trs_new_offers_.push_back(std::move(plain));
  return id;
}

std::uint64_t TripOrganizer::submit_request(const RequestPayload& request, const Token& token,
                                            std::uint64_t epoch) {
  std::shared_lock round(round_);
  check_epoch(epoch);
  if (const auto* r = std::get_if<nrs::NrsRequest>(&request)) {
    r->validate();
    check_dim(r->dim(), info_.m, "NRS request");
    auto plain = nrs::unmask_request(*r, secrets_);
    std::lock_guard lock(state_);
    consume_token(token);
    const auto id = next_id_++;
    plain.request_id = id;
    owners_[id] = token;
    nrs_requests_.push_back(std::move(plain));
    return id;
  }
  const auto& r = std::get<trs::TrsRequest>(request);
  r.validate();
  check_dim(r.dim(), info_.n(), "TRS request");
  auto plain = trs::unmask_request(r, secrets_);
  std::lock_guard lock(state_);
  consume_token(token);
  const auto id = next_id_++;
  plain.request_id = id;
  owners_[id] = token;
  trs_requests_.push_back(std::move(plain));
  return id;
}

void TripOrganizer::notify(const MatchResult& m) {
  inbox_[m.request_id].push_back(m);
  if (!m.matched) return;
  std::set<std::uint64_t> seen;
  for (auto id : m.offer_ids) {
    if (seen.insert(id).second) inbox_[id].push_back(m);
  }
}

std::vector<MatchResult> TripOrganizer::match_nrs() {
  std::vector<MatchResult> out;
  for (const auto& req : nrs_requests_) {
    MatchResult m;
    m.scheme = knn::Scheme::Nrs;
    m.request_id = req.request_id;
    m.rider_contact = req.contact_blob;
    for (auto& slot : nrs_offers_) {
      if (slot.remaining == 0) continue;
      const auto c = nrs::match_pair(slot.offer, req, info_.alpha);
      if (!c) continue;
      --slot.remaining;
      m.matched = true;
      m.ride_case = *c;
      m.offer_ids.push_back(slot.offer.offer_id);
      m.driver_contacts.push_back(slot.offer.contact_blob);
      break;
    }
    notify(m);
    out.push_back(std::move(m));
  }
  nrs_requests_.clear();
  std::erase_if(nrs_offers_, [](const NrsSlot& s) { return s.remaining == 0; });
  return out;
}

std::vector<MatchResult> TripOrganizer::match_trs() {
  for (const auto& o : trs_new_offers_) graph_.add_offer(o);
  trs_new_offers_.clear();
  std::vector<MatchResult> out;
  for (const auto& req : trs_requests_) {
    MatchResult m;
    m.scheme = knn::Scheme::Trs;
    m.request_id = req.request_id;
    m.rider_contact = req.contact_blob;
    if (auto path = trs::search(graph_, req, config_.max_paths)) {
      m.matched = true;
      m.offer_ids = path->offers;
      m.path = path->nodes;
      m.cell_count = static_cast<std::uint32_t>(path->cell_count);
      m.transfer_count = static_cast<std::uint32_t>(path->transfer_count);
      m.truncated = path->truncated;
      for (std::size_t i = 1; i < path->nodes.size(); ++i) {
        const auto& at = path->nodes[i];
        if (at.offer_id == path->nodes[i - 1].offer_id) continue;
        m.transfer_cells.push_back(trs_sources_.at(at.offer_id).masked_plus.at(at.position));
      }
      for (auto id : m.offer_ids) m.driver_contacts.push_back(trs_sources_.at(id).contact);
      trs::update_graph(graph_, {trs::ServedRequest{req.request_id, *path}});
    }
    notify(m);
    out.push_back(std::move(m));
  }
  trs_requests_.clear();
  return out;
}

std::vector<MatchResult> TripOrganizer::run_matching(knn::Scheme scheme) {
  std::unique_lock round(round_);
  return scheme == knn::Scheme::Nrs ? match_nrs() : match_trs();
}

std::vector<MatchResult> TripOrganizer::take_notifications(std::uint64_t id, const Token& token) {
  std::shared_lock round(round_);
  std::lock_guard lock(state_);
  auto owner = owners_.find(id);
  if (owner == owners_.end() || owner->second != token) {
    throw ServiceError(ErrorCode::BadToken, "token does not own submission " + std::to_string(id));
  }
  auto it = inbox_.find(id);
  if (it == inbox_.end()) return {};
  auto out = std::move(it->second);
  inbox_.erase(it);
  return out;
}

void TripOrganizer::rotate_epoch(const SystemInfo& info, const knn::TosSecrets* secrets) {
  std::unique_lock round(round_);
  if (secrets) secrets_ = *secrets;
  if (secrets_.nrs_dim() != info.m || secrets_.trs_dim() != info.n()) {
    throw std::invalid_argument("epoch parameters do not match the masking matrices");
  }
  info_ = info;
  nrs_offers_.clear();
  nrs_requests_.clear();
  graph_ = trs::TransferGraph(info.k);
  trs_new_offers_.clear();
  trs_sources_.clear();
  trs_requests_.clear();
}

std::size_t TripOrganizer::pending_offers(knn::Scheme scheme) const {
  std::shared_lock round(round_);
  std::lock_guard lock(state_);
  if (scheme == knn::Scheme::Nrs) return nrs_offers_.size();
  std::size_t active = trs_new_offers_.size();
  for (auto id : graph_.offer_ids()) active += graph_.offer_active(id) ? 1 : 0;
  return active;
}

std::size_t TripOrganizer::pending_requests(knn::Scheme scheme) const {
  std::shared_lock round(round_);
  std::lock_guard lock(state_);
  return scheme == knn::Scheme::Nrs ? nrs_requests_.size() : trs_requests_.size();
}

std::size_t TripOrganizer::unused_tokens() const {
  std::lock_guard lock(state_);
  return tokens_.size();
}

Envelope TripOrganizer::handle(const Envelope& env) {
  const auto epoch = info().epoch;
  try {
    switch (env.type) {
      case MsgType::SubmitOffer:
        return make_ack(submit_offer(decode_offer(env.payload), env.token, env.epoch), epoch);
      case MsgType::SubmitRequest:
        return make_ack(submit_request(decode_request(env.payload), env.token, env.epoch), epoch);
      case MsgType::RunMatching: {
        ByteReader r(env.payload);
        const auto s = r.get<std::uint8_t>();
        r.expect_done();
        if (s > 1) throw DecodeError("unknown scheme " + std::to_string(s));
        auto results = run_matching(static_cast<knn::Scheme>(s));
        return Envelope{MsgType::MatchNotification, epoch, {}, encode_matches(results)};
      }
      case MsgType::PollNotifications: {
        ByteReader r(env.payload);
        const auto id = r.get<std::uint64_t>();
        r.expect_done();
        auto results = take_notifications(id, env.token);
        return Envelope{MsgType::MatchNotification, epoch, {}, encode_matches(results)};
      }
      case MsgType::EpochAnnounce: {
        ByteWriter w;
        info().serialize(w);
        return Envelope{MsgType::EpochAnnounce, epoch, {}, w.take()};
      }
      default:
        return make_error(ErrorCode::UnknownType,
                          "organizer does not serve " + std::string(to_string(env.type)), epoch);
    }
  } catch (const ServiceError& e) {
    return make_error(e.code(), e.what(), epoch);
  } catch (const DecodeError& e) {
    return make_error(ErrorCode::BadPayload, e.what(), epoch);
  } catch (const std::invalid_argument& e) {
    return make_error(ErrorCode::BadPayload, e.what(), epoch);
  } catch (const std::exception& e) {
    return make_error(ErrorCode::Internal, e.what(), epoch);
  }
}

}  // namespace ppride::tos
