#include "ppride/tos/service.hpp"

namespace ppride::tos {

RideService::RideService(AuthorityConfig authority, std::uint64_t seed, OrganizerConfig organizer)
    : authority_(std::make_unique<TrustedAuthority>(std::move(authority), seed)),
      organizer_(std::make_unique<TripOrganizer>(authority_->info(), authority_->tos_secrets(),
                                                 organizer)) {
  authority_->set_token_sink([org = organizer_.get()](const std::vector<Token>& t) { org->accept_tokens(t); });
}

Envelope RideService::handle(const Envelope& env) {
  if (env.type == MsgType::RegisterUser) return authority_->handle(env);
  return organizer_->handle(env);
}

SystemInfo RideService::rotate_epoch() {
  const auto info = authority_->rotate_epoch();
  if (info.keys_rotated) {
    const auto secrets = authority_->tos_secrets();
    organizer_->rotate_epoch(info, &secrets);
  } else {
    organizer_->rotate_epoch(info, nullptr);
  }
  return info;
}

}  // namespace ppride::tos
