#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <vector>

#include "ppride/knn/tos_secrets.hpp"
#include "ppride/nrs/nrs.hpp"
#include "ppride/tos/protocol.hpp"
#include "ppride/tos/purity.hpp"
#include "ppride/trs/graph.hpp"
#include "ppride/trs/offer.hpp"

namespace ppride::tos {

struct OrganizerConfig {
  std::size_t max_paths = trs::kDefaultMaxPaths;
};

/// The honest-but-curious matching server. Ingestion handlers may run
/// concurrently; a matching round or an epoch change waits for them and
/// excludes new ones.
class TripOrganizer {
 public:
  TripOrganizer(SystemInfo info, knn::TosSecrets secrets, OrganizerConfig config = {});

  SystemInfo info() const;

  /// Tokens the authority issued; each is accepted exactly once.
  void accept_tokens(const std::vector<Token>& tokens);

  std::uint64_t submit_offer(const OfferPayload& offer, const Token& token, std::uint64_t epoch);
  std::uint64_t submit_request(const RequestPayload& request, const Token& token, std::uint64_t epoch);

  /// Matches everything pending for one scheme. Each pending request gets a
  /// single attempt; offers keep their remaining seats for later rounds.
  std::vector<MatchResult> run_matching(knn::Scheme scheme);

  /// Notifications queued for an offer or request id since the last poll.
  /// `token` must be the one the submission was made with.
  std::vector<MatchResult> take_notifications(std::uint64_t id, const Token& token);

  /// Purges all pending state and installs the new epoch. New secrets
  /// replace the old ones when the authority regenerated its keys.
  void rotate_epoch(const SystemInfo& info, const knn::TosSecrets* secrets);

  /// Serves SubmitOffer, SubmitRequest, RunMatching, PollNotifications and
  /// EpochAnnounce (as a query). Never throws.
  Envelope handle(const Envelope& env);

  std::size_t pending_offers(knn::Scheme scheme) const;
  std::size_t pending_requests(knn::Scheme scheme) const;
  std::size_t unused_tokens() const;

 private:
  struct NrsSlot {
    nrs::NrsOffer offer;  // unmasked
    std::uint32_t remaining;
  };
  struct TrsSource {
    std::vector<knn::EncryptedIndex> masked_plus;  // for relaying transfer cells
    Bytes contact;
  };

  void check_epoch(std::uint64_t epoch) const;
  void consume_token(const Token& token);
  void notify(const MatchResult& m);
  std::vector<MatchResult> match_nrs();
  std::vector<MatchResult> match_trs();

  mutable std::shared_mutex round_;  // shared: ingestion, exclusive: rounds and epochs
  mutable std::mutex state_;         // guards the containers below during ingestion

  SystemInfo info_;
  knn::TosSecrets secrets_;
  OrganizerConfig config_;
  std::uint64_t next_id_ = 1;
  std::set<Token> tokens_;
  std::map<std::uint64_t, Token> owners_;  // submission id -> token it was made with

  std::vector<NrsSlot> nrs_offers_;
  std::vector<nrs::NrsRequest> nrs_requests_;
  trs::TransferGraph graph_;
  std::vector<trs::TrsOffer> trs_new_offers_;  // unmasked, not yet in the graph
  std::map<std::uint64_t, TrsSource> trs_sources_;
  std::vector<trs::TrsRequest> trs_requests_;
  std::map<std::uint64_t, std::vector<MatchResult>> inbox_;

 public:
  using StateTypes =
      type_list<SystemInfo, knn::TosSecrets, OrganizerConfig, std::set<Token>,
                std::map<std::uint64_t, Token>, std::vector<NrsSlot>,
                std::vector<nrs::NrsRequest>, trs::TransferGraph, std::vector<trs::TrsOffer>,
                std::map<std::uint64_t, TrsSource>, std::vector<trs::TrsRequest>,
                std::map<std::uint64_t, std::vector<MatchResult>>>;
};

static_assert(!any_tainted<TripOrganizer::StateTypes>::value,
              "organizer state must not hold key material or plaintext locations");

}  // namespace ppride::tos
