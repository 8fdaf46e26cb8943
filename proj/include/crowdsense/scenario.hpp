#pragma once

#include "crowdsense/auction_types.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>

namespace crowdsense {

/// Grid-world generator parameters. Users and tasks land uniformly on a
/// grid_size x grid_size board; a user bids on every task within bid_radius
/// (Euclidean distance between cells) at a per-task cost drawn uniformly from
/// [cost_min, cost_max] in 0.01-credit steps.
struct Scenario {
  int grid_size = 100;
  int n_users = 0;
  int n_tasks = 0;
  double bid_radius = 15.0;
  Rational cost_min = Rational(50);
  Rational cost_max = Rational(100);
  double alpha = 0.9;
  double beta = 0.9;
  std::optional<int> r_override;  // pin r instead of deriving it from alpha/beta
  std::uint64_t seed = 1;
};

/// r the scenario will be run with: the override when set, otherwise derived.
int scenario_repeat_factor(const Scenario& s);

struct InfeasibleScenario : std::runtime_error {
  InfeasibleScenario(std::uint64_t bad_seed, std::vector<int> tasks, std::vector<int> users)
      : std::runtime_error("generated scenario fails feasibility at seed " +
                           std::to_string(bad_seed)),
        seed(bad_seed),
        deficient_tasks(std::move(tasks)),
        pivotal_users(std::move(users))
  {}
  std::uint64_t seed;
  std::vector<int> deficient_tasks;
  std::vector<int> pivotal_users;
};

/// Deterministic instance for the scenario. Each user and task consumes its
/// own RNG substream keyed by (seed, role, index), so entity k looks the same
/// no matter how many entities follow it — sweeps over n_users share draws.
/// Users with no task in reach simply do not bid.
AuctionInstance generate_scenario_unchecked(const Scenario& s);

/// generate_scenario_unchecked + feasibility/competition validation; throws
/// InfeasibleScenario when the draw cannot support the repeat factor.
AuctionInstance generate_scenario(const Scenario& s);

/// Scans seeds s.seed, s.seed+1, ... for the first feasible draw; used_seed
/// reports which one was kept. Throws InfeasibleScenario (with the last seed)
/// after max_attempts failures.
AuctionInstance generate_feasible_scenario(const Scenario& s, int max_attempts,
                                           std::uint64_t* used_seed);

/// Uniform integer in [lo, hi] via rejection sampling; byte-stable across
/// platforms, unlike std::uniform_int_distribution.
std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi);

/// Seeded generator for substream (seed, tag, index).
std::mt19937_64 substream(std::uint64_t seed, std::uint32_t tag, std::uint32_t index);

nlohmann::json instance_to_json(const AuctionInstance& inst);
AuctionInstance instance_from_json(const nlohmann::json& j);

/// Canonical serialized form; byte-identical for identical instances.
std::string canonical_instance_text(const AuctionInstance& inst);

}  // namespace crowdsense
