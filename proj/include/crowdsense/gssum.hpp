#pragma once

#include "crowdsense/auction_types.hpp"

namespace crowdsense {

/// Selection score for the set-cover baseline. Both variants hand the chosen
/// bidder its entire bid set and pay reported cost for every task in it; they
/// differ only in which bidder the greedy picks next.
enum class GssumScore {
  set_cost_per_gain,  // (cost_per_task * |bid set|) / copies still needed
  per_task_cost,      // plain cost_per_task among bidders with positive gain
};

const char* gssum_score_name(GssumScore score);

/// Greedy set-cover baseline: repeatedly select the unselected bidder with the
/// best score among those whose bid set still supplies needed task copies,
/// assign it one copy of EVERY task in its bid set (redundant copies included),
/// and pay cost_per_task * |bid set|. Loops until every task has r assigned
/// users; throws InfeasibleInstance when coverage stalls first.
AuctionOutcome run_gssum(const AuctionInstance& inst, int r,
                         GssumScore score = GssumScore::set_cost_per_gain);

}  // namespace crowdsense
