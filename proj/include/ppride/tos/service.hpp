#pragma once

#include <cstdint>
#include <memory>

#include "ppride/tos/authority.hpp"
#include "ppride/tos/organizer.hpp"

namespace ppride::tos {

/// Authority and organizer behind one endpoint, for single-host deployments
/// and tests. The organizer still only receives what the authority hands it.
class RideService {
 public:
  RideService(AuthorityConfig authority, std::uint64_t seed, OrganizerConfig organizer = {});

  /// RegisterUser goes to the authority, everything else to the organizer.
  Envelope handle(const Envelope& env);

  /// Starts the next epoch on both sides.
  SystemInfo rotate_epoch();

  TrustedAuthority& authority() { return *authority_; }
  TripOrganizer& organizer() { return *organizer_; }

 private:
  std::unique_ptr<TrustedAuthority> authority_;
  std::unique_ptr<TripOrganizer> organizer_;
};

}  // namespace ppride::tos
