#include "crowdsense/csopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace crowdsense {
namespace {

bool meets_assurance(double alpha, int r, double beta) {
  return 1.0 - std::pow(1.0 - alpha, r) >= beta;
}

std::vector<std::size_t> cheapest_first_order(const std::vector<Bid>& bids) {
  std::vector<std::size_t> order(bids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (bids[a].cost_per_task != bids[b].cost_per_task)
      return bids[a].cost_per_task < bids[b].cost_per_task;
    return bids[a].user_id < bids[b].user_id;
  });
  return order;
}

// One pass suffices: the remaining multiset only shrinks, so a bidder skipped
// for an empty intersection never becomes eligible again.
Assignments greedy(const TaskMultiset& tasks_remaining, const std::vector<Bid>& bids,
                   const std::vector<std::size_t>& order, int skip_user) {
  std::unordered_map<int, int> remaining;
  long long total = 0;
  for (const auto& [task_id, copies] : tasks_remaining) {
    if (copies < 0) throw std::invalid_argument("negative copy count");
    if (copies > 0) {
      remaining.emplace(task_id, copies);
      total += copies;
    }
  }

  Assignments result;
  for (std::size_t idx : order) {
    if (total == 0) break;
    const Bid& bid = bids[idx];
    if (bid.user_id == skip_user) continue;
    std::vector<int> take;
    const std::size_t cap =
        bid.capacity ? static_cast<std::size_t>(*bid.capacity) : bid.task_ids.size();
    for (int task_id : bid.task_ids) {
      if (take.size() == cap) break;
      auto it = remaining.find(task_id);
      if (it != remaining.end() && it->second > 0) take.push_back(task_id);
    }
    if (take.empty()) continue;
    for (int task_id : take) {
      auto it = remaining.find(task_id);
      --it->second;
      --total;
    }
    result.emplace(bid.user_id, std::move(take));
  }

  if (total > 0) {
    std::vector<int> uncovered;
    for (const auto& [task_id, copies] : remaining)
      if (copies > 0) uncovered.push_back(task_id);
    std::sort(uncovered.begin(), uncovered.end());
    throw InfeasibleInstance(std::move(uncovered));
  }
  return result;
}

Rational cost_of(const Assignments& assignments,
                 const std::unordered_map<int, const Bid*>& by_user) {
  Rational total(0);
  for (const auto& [user_id, tasks] : assignments) {
    auto it = by_user.find(user_id);
    if (it == by_user.end())
      throw std::invalid_argument("assignment references unknown user " + std::to_string(user_id));
    total += it->second->cost_per_task * Rational(static_cast<std::int64_t>(tasks.size()));
  }
  return total;
}

std::unordered_map<int, const Bid*> index_bids(const std::vector<Bid>& bids) {
  std::unordered_map<int, const Bid*> by_user;
  by_user.reserve(bids.size());
  for (const Bid& bid : bids) by_user.emplace(bid.user_id, &bid);
  return by_user;
}

}  // namespace

int repeat_factor(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("beta must lie in (0,1)");
  const double ratio = std::log1p(-beta) / std::log1p(-alpha);
  int r = std::max(1, static_cast<int>(std::ceil(ratio - 1e-12)));
  while (!meets_assurance(alpha, r, beta)) ++r;
  while (r > 1 && meets_assurance(alpha, r - 1, beta)) --r;
  return r;
}

FeasibilityReport validate_instance(const AuctionInstance& inst, int r) {
  std::unordered_map<int, int> interested;
  for (const Task& task : inst.tasks) interested[task.id] = 0;
  for (const Bid& bid : inst.bids)
    for (int task_id : bid.task_ids) {
      auto it = interested.find(task_id);
      if (it != interested.end()) ++it->second;
    }

  FeasibilityReport report;
  std::unordered_set<int> tight;  // tasks where losing one bidder breaks coverage
  for (const Task& task : inst.tasks) {
    const int count = interested[task.id];
    if (count < r)
      report.deficient_tasks.push_back(task.id);
    else if (count == r)
      tight.insert(task.id);
  }
  std::sort(report.deficient_tasks.begin(), report.deficient_tasks.end());

  for (const Bid& bid : inst.bids) {
    const bool pivotal = std::any_of(bid.task_ids.begin(), bid.task_ids.end(),
                                     [&](int task_id) { return tight.count(task_id) > 0; });
    if (pivotal) report.pivotal_users.push_back(bid.user_id);
  }
  std::sort(report.pivotal_users.begin(), report.pivotal_users.end());

  report.feasible = report.deficient_tasks.empty() && report.pivotal_users.empty();
  return report;
}

TaskMultiset make_task_copies(const AuctionInstance& inst, int r) {
  TaskMultiset copies;
  for (const Task& task : inst.tasks) copies[task.id] = r;
  return copies;
}

Assignments alloc_rule(const TaskMultiset& tasks_remaining, const std::vector<Bid>& bids) {
  return greedy(tasks_remaining, bids, cheapest_first_order(bids), /*skip_user=*/-1);
}

Rational allocation_cost(const Assignments& assignments, const std::vector<Bid>& bids) {
  return cost_of(assignments, index_bids(bids));
}

std::map<int, Rational> payment_rule(const AuctionInstance& inst, int r,
                                     const Assignments& assignments) {
  const TaskMultiset copies = make_task_copies(inst, r);
  const std::vector<std::size_t> order = cheapest_first_order(inst.bids);
  const auto by_user = index_bids(inst.bids);
  const Rational full_cost = cost_of(assignments, by_user);

  std::map<int, Rational> payments;
  for (const Bid& bid : inst.bids) payments[bid.user_id] = Rational(0);

  for (const auto& [user_id, tasks] : assignments) {
    Assignments without;
    try {
      without = greedy(copies, inst.bids, order, user_id);
    } catch (const InfeasibleInstance&) {
      throw CompetitionViolation({user_id});
    }
    const Rational solo_cost = cost_of(without, by_user);
    const Bid& bid = *by_user.at(user_id);
    payments[user_id] =
        bid.cost_per_task * Rational(static_cast<std::int64_t>(tasks.size())) + solo_cost - full_cost;
  }
  return payments;
}

AuctionOutcome run_csopt(const AuctionInstance& inst) {
  return run_csopt(inst, repeat_factor(inst.alpha, inst.beta));
}

AuctionOutcome run_csopt(const AuctionInstance& inst, int r) {
  check_instance(inst);
  if (r < 1) throw std::invalid_argument("repeat factor must be positive");
  const FeasibilityReport report = validate_instance(inst, r);
  if (!report.deficient_tasks.empty()) throw InfeasibleInstance(report.deficient_tasks);
  if (!report.pivotal_users.empty()) throw CompetitionViolation(report.pivotal_users);

  const Assignments assignments = alloc_rule(make_task_copies(inst, r), inst.bids);
  const std::map<int, Rational> payments = payment_rule(inst, r, assignments);

  AuctionOutcome outcome;
  outcome.repeat_factor = r;
  outcome.payments = payments;
  outcome.total_cost = allocation_cost(assignments, inst.bids);
  outcome.total_payment = Rational(0);
  for (const auto& [user_id, pay] : payments) outcome.total_payment += pay;

  // Copy indices: holders of each task, ascending user id, get 0..r-1.
  std::map<int, int> next_copy;
  for (const auto& [user_id, tasks] : assignments) {
    std::vector<TaskCopy>& held = outcome.assignments[user_id];
    held.reserve(tasks.size());
    for (int task_id : tasks) held.push_back({task_id, next_copy[task_id]++});
    std::sort(held.begin(), held.end());
  }
  return outcome;
}

std::size_t assigned_count_at_cost(const AuctionInstance& inst, int r, int user_id,
                                   const Rational& reported_cost) {
  std::vector<Bid> bids = inst.bids;
  bool found = false;
  for (Bid& bid : bids) {
    if (bid.user_id == user_id) {
      bid.cost_per_task = reported_cost;
      found = true;
      break;
    }
  }
  if (!found) throw std::invalid_argument("unknown user " + std::to_string(user_id));
  TaskMultiset copies;
  for (const Task& task : inst.tasks) copies[task.id] = r;
  const Assignments assignments = alloc_rule(copies, bids);
  auto it = assignments.find(user_id);
  return it == assignments.end() ? 0 : it->second.size();
}

void check_instance(const AuctionInstance& inst) {
  if (!(inst.alpha > 0.0 && inst.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(inst.beta > 0.0 && inst.beta < 1.0))
    throw std::invalid_argument("beta must lie in (0,1)");
  if (inst.tasks.empty()) throw std::invalid_argument("instance has no tasks");

  std::unordered_set<int> task_ids;
  for (const Task& task : inst.tasks)
    if (!task_ids.insert(task.id).second)
      throw std::invalid_argument("duplicate task id " + std::to_string(task.id));

  std::unordered_set<int> user_ids;
  for (const Bid& bid : inst.bids) {
    if (!user_ids.insert(bid.user_id).second)
      throw std::invalid_argument("duplicate user id " + std::to_string(bid.user_id));
    if (bid.cost_per_task < Rational(0))
      throw std::invalid_argument("negative cost for user " + std::to_string(bid.user_id));
    if (bid.task_ids.empty())
      throw std::invalid_argument("empty task set for user " + std::to_string(bid.user_id));
    if (!std::is_sorted(bid.task_ids.begin(), bid.task_ids.end()) ||
        std::adjacent_find(bid.task_ids.begin(), bid.task_ids.end()) != bid.task_ids.end())
      throw std::invalid_argument("task set for user " + std::to_string(bid.user_id) +
                                  " must be sorted and duplicate-free");
    for (int task_id : bid.task_ids)
      if (task_ids.count(task_id) == 0)
        throw std::invalid_argument("user " + std::to_string(bid.user_id) +
                                    " bids on unknown task " + std::to_string(task_id));
    if (bid.capacity && *bid.capacity < 1)
      throw std::invalid_argument("capacity must be at least 1");
  }
}

Rational bidder_utility(const AuctionOutcome& outcome, int user_id, const Rational& true_cost) {
  return outcome.payment(user_id) -
         true_cost * Rational(static_cast<std::int64_t>(outcome.assigned_count(user_id)));
}

}  // namespace crowdsense
