#pragma once

#include "crowdsense/gssum.hpp"
#include "crowdsense/report.hpp"
#include "crowdsense/scenario.hpp"

#include <string>
#include <vector>

namespace crowdsense {

/// Cross-product sweep description. For every (n_users, n_tasks, r) cell the
/// harness keeps the first `seeds` feasible draws found by scanning seeds
/// upward from base_seed, runs the selected algorithm(s) on each, and emits
/// one ResultRow per run.
struct SweepSpec {
  std::vector<int> users_values;
  std::vector<int> tasks_values;
  std::vector<int> r_values{1};
  Scenario base;                    // grid/radius/cost/alpha/beta template
  int seeds = 10;
  std::uint64_t base_seed = 1;
  std::string algo = "both";        // csopt | gssum | both
  GssumScore gssum_score = GssumScore::set_cost_per_gain;
  int max_attempts = 20000;         // seed-scan bound per cell
  bool parallel = true;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;       // sorted by (algorithm, users, tasks, r, seed)
  std::vector<std::string> errors;   // cells whose seed scan was exhausted
};

ExperimentResult run_experiment(const SweepSpec& spec);

/// Mean and standard error of total_payment per (algorithm, users, tasks, r).
struct Aggregate {
  std::string algorithm;
  int n_users = 0;
  int n_tasks = 0;
  int r = 1;
  int count = 0;
  double mean_payment = 0.0;
  double stderr_payment = 0.0;
  double mean_runtime = 0.0;
};

std::vector<Aggregate> aggregate_rows(const std::vector<ResultRow>& rows);

struct TrendCheck {
  bool passed = true;
  std::string detail;  // the offending step, when failed
};

/// direction=-1: means must not increase along the sequence; +1: must not
/// decrease. A step only fails when it moves the wrong way by more than two
/// (combined) standard errors.
TrendCheck check_direction(const std::vector<Aggregate>& ordered, int direction);

/// Wall-clock rows for the full auction at the given sizes (always feasible
/// seeds, algorithm "csopt").
std::vector<ResultRow> bench_timing(const std::vector<std::pair<int, int>>& sizes,
                                    const Scenario& base, std::uint64_t base_seed);

}  // namespace crowdsense
