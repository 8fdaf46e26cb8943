#include "crowdsense/gssum.hpp"

#include "crowdsense/csopt.hpp"

#include <algorithm>
#include <unordered_map>

namespace crowdsense {

const char* gssum_score_name(GssumScore score) {
  switch (score) {
    case GssumScore::set_cost_per_gain:
      return "set_cost_per_gain";
    case GssumScore::per_task_cost:
      return "per_task_cost";
  }
  return "unknown";
}

AuctionOutcome run_gssum(const AuctionInstance& inst, int r, GssumScore score) {
  check_instance(inst);
  if (r < 1) throw std::invalid_argument("repeat factor must be positive");

  std::unordered_map<int, int> needed;
  long long total_needed = 0;
  for (const Task& task : inst.tasks) {
    needed[task.id] = r;
    total_needed += r;
  }

  const std::size_t n = inst.bids.size();
  std::vector<bool> selected(n, false);
  std::vector<std::size_t> picks;

  while (total_needed > 0) {
    std::size_t best = n;
    // Scores are compared cross-multiplied so ties stay exact.
    Rational best_num(0), best_den(1);
    for (std::size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      const Bid& bid = inst.bids[i];
      int gain = 0;
      for (int task_id : bid.task_ids)
        if (needed[task_id] > 0) ++gain;
      if (gain == 0) continue;
      Rational num = bid.cost_per_task;
      Rational den(1);
      if (score == GssumScore::set_cost_per_gain) {
        num *= Rational(static_cast<std::int64_t>(bid.task_ids.size()));
        den = Rational(gain);
      }
      const bool better =
          best == n || num * best_den < best_num * den ||
          (num * best_den == best_num * den && inst.bids[i].user_id < inst.bids[best].user_id);
      if (better) {
        best = i;
        best_num = num;
        best_den = den;
      }
    }
    if (best == n) {
      std::vector<int> uncovered;
      for (const auto& [task_id, copies] : needed)
        if (copies > 0) uncovered.push_back(task_id);
      std::sort(uncovered.begin(), uncovered.end());
      throw InfeasibleInstance(std::move(uncovered));
    }
    selected[best] = true;
    picks.push_back(best);
    for (int task_id : inst.bids[best].task_ids) {
      int& copies = needed[task_id];
      if (copies > 0) {
        --copies;
        --total_needed;
      }
    }
  }

  AuctionOutcome outcome;
  outcome.repeat_factor = r;
  outcome.total_cost = Rational(0);
  outcome.total_payment = Rational(0);
  for (const Bid& bid : inst.bids) outcome.payments[bid.user_id] = Rational(0);

  // Selected bidders hold their full bid sets; copy indices per task follow
  // ascending user id, so redundant holders get indices at and beyond r.
  std::sort(picks.begin(), picks.end(),
            [&](std::size_t a, std::size_t b) { return inst.bids[a].user_id < inst.bids[b].user_id; });
  std::map<int, int> next_copy;
  for (std::size_t i : picks) {
    const Bid& bid = inst.bids[i];
    std::vector<TaskCopy>& held = outcome.assignments[bid.user_id];
    held.reserve(bid.task_ids.size());
    for (int task_id : bid.task_ids) held.push_back({task_id, next_copy[task_id]++});
    const Rational paid =
        bid.cost_per_task * Rational(static_cast<std::int64_t>(bid.task_ids.size()));
    outcome.payments[bid.user_id] = paid;
    outcome.total_payment += paid;
    outcome.total_cost += paid;  // paid at reported cost, so cost == payment
  }
  return outcome;
}

}  // namespace crowdsense
