#include "crowdsense/brute_force.hpp"

#include "crowdsense/csopt.hpp"

#include <algorithm>
#include <unordered_map>

namespace crowdsense {
namespace {

// All r-subsets of {0..k-1}, emitted in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(int k, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick(r);
  for (int i = 0; i < r; ++i) pick[i] = i;
  while (true) {
    out.push_back(pick);
    int pos = r - 1;
    while (pos >= 0 && pick[pos] == k - r + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int i = pos + 1; i < r; ++i) pick[i] = pick[i - 1] + 1;
  }
  return out;
}

}  // namespace

BruteForceResult brute_force_ae(const AuctionInstance& inst, int r,
                                std::uint64_t max_candidates) {
  check_instance(inst);
  if (r < 1) throw std::invalid_argument("repeat factor must be positive");

  std::unordered_map<int, std::vector<std::size_t>> interested;
  for (std::size_t i = 0; i < inst.bids.size(); ++i)
    for (int task_id : inst.bids[i].task_ids) interested[task_id].push_back(i);

  std::vector<int> deficient;
  for (const Task& task : inst.tasks)
    if (interested[task.id].size() < static_cast<std::size_t>(r)) deficient.push_back(task.id);
  if (!deficient.empty()) {
    std::sort(deficient.begin(), deficient.end());
    throw InfeasibleInstance(std::move(deficient));
  }

  // choices[j] lists, for task j, every r-subset of its interested bidders.
  std::vector<int> task_ids;
  std::vector<std::vector<std::vector<int>>> choices;
  std::uint64_t candidates = 1;
  for (const Task& task : inst.tasks) {
    const auto& holders = interested[task.id];
    auto combos = subsets_of_size(static_cast<int>(holders.size()), r);
    for (auto& combo : combos)
      for (int& slot : combo) slot = static_cast<int>(holders[slot]);
    if (candidates > max_candidates / combos.size())
      throw SearchSpaceTooLarge(max_candidates + 1);
    candidates *= combos.size();
    task_ids.push_back(task.id);
    choices.push_back(std::move(combos));
  }
  if (candidates > max_candidates) throw SearchSpaceTooLarge(candidates);

  const std::size_t n_tasks = task_ids.size();
  std::vector<std::size_t> odometer(n_tasks, 0);
  std::vector<int> load(inst.bids.size(), 0);

  bool have_best = false;
  Rational best_cost(0);
  std::vector<std::size_t> best_odometer;

  while (true) {
    std::fill(load.begin(), load.end(), 0);
    for (std::size_t j = 0; j < n_tasks; ++j)
      for (int bidder : choices[j][odometer[j]]) ++load[bidder];

    bool ok = true;
    Rational cost(0);
    for (std::size_t i = 0; i < inst.bids.size() && ok; ++i) {
      if (load[i] == 0) continue;
      const Bid& bid = inst.bids[i];
      if (bid.capacity && load[i] > *bid.capacity) ok = false;
      cost += bid.cost_per_task * Rational(load[i]);
    }
    if (ok && (!have_best || cost < best_cost)) {
      have_best = true;
      best_cost = cost;
      best_odometer = odometer;
    }

    std::size_t pos = 0;
    while (pos < n_tasks && ++odometer[pos] == choices[pos].size()) odometer[pos++] = 0;
    if (pos == n_tasks) break;
  }

  if (!have_best) throw InfeasibleInstance({});  // only capacities can cause this

  BruteForceResult result;
  result.cost = best_cost;
  for (std::size_t j = 0; j < n_tasks; ++j)
    for (int bidder : choices[j][best_odometer[j]])
      result.assignments[inst.bids[bidder].user_id].push_back(task_ids[j]);
  for (auto& [user_id, tasks] : result.assignments) std::sort(tasks.begin(), tasks.end());
  return result;
}

}  // namespace crowdsense
