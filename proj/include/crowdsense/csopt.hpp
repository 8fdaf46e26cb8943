#pragma once

#include "crowdsense/auction_types.hpp"

namespace crowdsense {

/// Smallest integer r with 1-(1-alpha)^r >= beta, i.e. the number of distinct
/// users each task needs so it completes with probability at least beta.
/// Throws std::domain_error unless alpha and beta lie strictly in (0,1).
int repeat_factor(double alpha, double beta);

struct FeasibilityReport {
  bool feasible = false;
  std::vector<int> deficient_tasks;  // tasks with fewer than r interested bidders
  std::vector<int> pivotal_users;    // bidders whose removal breaks coverage
};

/// Coverage check plus the competition requirement: the instance must stay
/// coverable when any single bidder is removed, otherwise the payment rule
/// is undefined for that bidder.
FeasibilityReport validate_instance(const AuctionInstance& inst, int r);

/// r copies of every task in the instance.
TaskMultiset make_task_copies(const AuctionInstance& inst, int r);

/// Cheapest-first greedy: repeatedly pick the unselected bidder with minimum
/// cost per task (ties by ascending user id) among those intersecting the
/// remaining multiset, hand it one copy of each remaining task in its bid set
/// (the first `capacity` of them, ascending task id, when capacity is finite),
/// and remove those copies. Each bidder is selected at most once.
/// Throws InfeasibleInstance if copies remain once all bidders are exhausted.
Assignments alloc_rule(const TaskMultiset& tasks_remaining, const std::vector<Bid>& bids);

/// Sum of cost_per_task * assigned count. Throws std::invalid_argument for an
/// assignment naming a user with no bid.
Rational allocation_cost(const Assignments& assignments, const std::vector<Bid>& bids);

/// Pivotal payments: p_j = n_j * c_j + cost(greedy without j) - cost(greedy).
/// Unassigned bidders are paid 0. Throws CompetitionViolation when removing
/// an assigned bidder makes the instance infeasible.
std::map<int, Rational> payment_rule(const AuctionInstance& inst, int r,
                                     const Assignments& assignments);

/// Full auction: derive r, validate, allocate the r-fold task copies, price.
AuctionOutcome run_csopt(const AuctionInstance& inst);

/// Same pipeline with the repeat factor pinned instead of derived from
/// alpha/beta; experiment sweeps over r use this form.
AuctionOutcome run_csopt(const AuctionInstance& inst, int r);

/// Number of tasks the greedy hands `user_id` when that user reports
/// `reported_cost` and everyone else bids as in `inst`. Used by the
/// monotonicity and payment-identity checks.
std::size_t assigned_count_at_cost(const AuctionInstance& inst, int r, int user_id,
                                   const Rational& reported_cost);

/// Structural sanity of an instance (unique ids, subsets, ranges).
/// Throws std::invalid_argument with a description of the first violation.
void check_instance(const AuctionInstance& inst);

/// Utility of `user_id` under `outcome` when its true cost is `true_cost`.
Rational bidder_utility(const AuctionOutcome& outcome, int user_id, const Rational& true_cost);

}  // namespace crowdsense
