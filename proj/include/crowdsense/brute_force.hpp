#pragma once

#include "crowdsense/auction_types.hpp"

#include <cstdint>

namespace crowdsense {

struct BruteForceResult {
  Rational cost;            // exact minimum total cost over all feasible assignments
  Assignments assignments;  // one argmin witness
};

/// Exhaustive reference optimum: enumerates, per task, every way to pick r
/// distinct interested users, and minimizes total cost subject to capacities.
/// Only meant for small instances; throws SearchSpaceTooLarge once the
/// candidate count exceeds `max_candidates`, and InfeasibleInstance when some
/// task has fewer than r interested bidders.
BruteForceResult brute_force_ae(const AuctionInstance& inst, int r,
                                std::uint64_t max_candidates = 2'000'000);

}  // namespace crowdsense
