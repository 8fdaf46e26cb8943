#include "crowdsense/scenario.hpp"

#include "crowdsense/csopt.hpp"

#include <algorithm>

namespace crowdsense {
namespace {

constexpr std::uint32_t kUserStream = 1;
constexpr std::uint32_t kTaskStream = 2;

}  // namespace

int scenario_repeat_factor(const Scenario& s) {
  return s.r_override ? *s.r_override : repeat_factor(s.alpha, s.beta);
}

std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw std::invalid_argument("empty range");
  const std::uint64_t span = hi - lo + 1;  // span 0 means the full 2^64 range
  if (span == 0) return rng();
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return lo + draw % span;
}

std::mt19937_64 substream(std::uint64_t seed, std::uint32_t tag, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    tag, index};
  return std::mt19937_64(seq);
}

AuctionInstance generate_scenario_unchecked(const Scenario& s) {
  if (s.grid_size < 1 || s.n_users < 1 || s.n_tasks < 1)
    throw std::invalid_argument("counts must be positive");
  if (s.cost_min > s.cost_max) throw std::invalid_argument("cost range inverted");
  if (s.bid_radius < 0.0) throw std::invalid_argument("radius must be nonnegative");

  AuctionInstance inst;
  inst.alpha = s.alpha;
  inst.beta = s.beta;

  const std::uint64_t side = static_cast<std::uint64_t>(s.grid_size);
  inst.tasks.reserve(s.n_tasks);
  for (int j = 0; j < s.n_tasks; ++j) {
    auto rng = substream(s.seed, kTaskStream, static_cast<std::uint32_t>(j));
    Task task;
    task.id = j;
    task.row = static_cast<int>(uniform_u64(rng, 0, side - 1));
    task.col = static_cast<int>(uniform_u64(rng, 0, side - 1));
    inst.tasks.push_back(task);
  }

  const std::int64_t lo = to_centi(s.cost_min);
  const std::int64_t hi = to_centi(s.cost_max);
  const double radius_sq = s.bid_radius * s.bid_radius;

  inst.bids.reserve(s.n_users);
  for (int i = 0; i < s.n_users; ++i) {
    auto rng = substream(s.seed, kUserStream, static_cast<std::uint32_t>(i));
    const int row = static_cast<int>(uniform_u64(rng, 0, side - 1));
    const int col = static_cast<int>(uniform_u64(rng, 0, side - 1));
    const std::int64_t cost_centi = static_cast<std::int64_t>(
        uniform_u64(rng, static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)));

    Bid bid;
    bid.user_id = i;
    bid.cost_per_task = centi(cost_centi);
    for (const Task& task : inst.tasks) {
      const double dr = task.row - row;
      const double dc = task.col - col;
      if (dr * dr + dc * dc <= radius_sq) bid.task_ids.push_back(task.id);
    }
    if (!bid.task_ids.empty()) inst.bids.push_back(std::move(bid));
  }
  return inst;
}

AuctionInstance generate_scenario(const Scenario& s) {
  AuctionInstance inst = generate_scenario_unchecked(s);
  const FeasibilityReport report = validate_instance(inst, scenario_repeat_factor(s));
  if (!report.feasible)
    throw InfeasibleScenario(s.seed, report.deficient_tasks, report.pivotal_users);
  return inst;
}

AuctionInstance generate_feasible_scenario(const Scenario& s, int max_attempts,
                                           std::uint64_t* used_seed) {
  Scenario attempt = s;
  for (int tries = 0; tries < max_attempts; ++tries) {
    try {
      AuctionInstance inst = generate_scenario(attempt);
      if (used_seed) *used_seed = attempt.seed;
      return inst;
    } catch (const InfeasibleScenario&) {
      ++attempt.seed;
    }
  }
  throw InfeasibleScenario(attempt.seed, {}, {});
}

nlohmann::json instance_to_json(const AuctionInstance& inst) {
  nlohmann::json j;
  j["alpha"] = inst.alpha;
  j["beta"] = inst.beta;
  j["tasks"] = nlohmann::json::array();
  for (const Task& task : inst.tasks)
    j["tasks"].push_back({{"id", task.id}, {"row", task.row}, {"col", task.col}});
  j["bids"] = nlohmann::json::array();
  for (const Bid& bid : inst.bids) {
    nlohmann::json b{{"user_id", bid.user_id},
                     {"cost_per_task", to_string(bid.cost_per_task)},
                     {"task_ids", bid.task_ids}};
    if (bid.capacity) b["capacity"] = *bid.capacity;
    j["bids"].push_back(std::move(b));
  }
  return j;
}

AuctionInstance instance_from_json(const nlohmann::json& j) {
  AuctionInstance inst;
  inst.alpha = j.at("alpha").get<double>();
  inst.beta = j.at("beta").get<double>();
  for (const auto& t : j.at("tasks"))
    inst.tasks.push_back({t.at("id").get<int>(), t.at("row").get<int>(), t.at("col").get<int>()});
  for (const auto& b : j.at("bids")) {
    Bid bid;
    bid.user_id = b.at("user_id").get<int>();
    bid.cost_per_task = parse_rational(b.at("cost_per_task").get<std::string>());
    bid.task_ids = b.at("task_ids").get<std::vector<int>>();
    if (b.contains("capacity")) bid.capacity = b.at("capacity").get<int>();
    inst.bids.push_back(std::move(bid));
  }
  return inst;
}

std::string canonical_instance_text(const AuctionInstance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

}  // namespace crowdsense
