#pragma once

#include "crowdsense/rational.hpp"

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdsense {

/// A location-bound sensing task on a square grid.
struct Task {
  int id = 0;
  int row = 0;
  int col = 0;
};

/// One mobile user's offer: a constant cost per task and the set of task ids
/// the user is willing (and able) to perform. `capacity`, when present, caps
/// how many tasks the user may be assigned.
struct Bid {
  int user_id = 0;
  Rational cost_per_task;
  std::vector<int> task_ids;  // sorted, unique, nonempty
  std::optional<int> capacity;
};

struct AuctionInstance {
  std::vector<Task> tasks;
  std::vector<Bid> bids;
  double alpha = 0.9;  // per-user task success probability, in (0,1)
  double beta = 0.9;   // required completion assurance, in (0,1)
};

/// One copy of a task held by some user. Copies of the same task id go to
/// distinct users; copy_index enumerates them 0..r-1.
struct TaskCopy {
  int task_id = 0;
  int copy_index = 0;
  friend auto operator<=>(const TaskCopy&, const TaskCopy&) = default;
};

struct AuctionOutcome {
  std::map<int, std::vector<TaskCopy>> assignments;  // user_id -> sorted copies
  std::map<int, Rational> payments;                  // user_id -> payment (0 if unassigned)
  Rational total_cost;
  Rational total_payment;
  int repeat_factor = 1;

  std::size_t assigned_count(int user_id) const {
    auto it = assignments.find(user_id);
    return it == assignments.end() ? 0 : it->second.size();
  }
  Rational payment(int user_id) const {
    auto it = payments.find(user_id);
    return it == payments.end() ? Rational(0) : it->second;
  }
};

/// Multiset of task copies still to be assigned: task id -> copies needed.
using TaskMultiset = std::map<int, int>;

/// Greedy allocation result: user_id -> task ids (one copy each, sorted).
using Assignments = std::map<int, std::vector<int>>;

struct InfeasibleInstance : std::runtime_error {
  explicit InfeasibleInstance(std::vector<int> tasks_uncovered)
      : std::runtime_error("instance infeasible: tasks lack enough interested bidders"),
        deficient_tasks(std::move(tasks_uncovered)) {}
  std::vector<int> deficient_tasks;
};

struct CompetitionViolation : std::runtime_error {
  explicit CompetitionViolation(std::vector<int> users)
      : std::runtime_error("removing a bidder makes the instance infeasible"),
        pivotal_users(std::move(users)) {}
  std::vector<int> pivotal_users;
};

struct SearchSpaceTooLarge : std::runtime_error {
  explicit SearchSpaceTooLarge(std::uint64_t candidate_count)
      : std::runtime_error("enumeration bound exceeded"), candidates(candidate_count) {}
  std::uint64_t candidates;
};

}  // namespace crowdsense
