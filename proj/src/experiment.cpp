#include "crowdsense/experiment.hpp"

#include "crowdsense/csopt.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace crowdsense {
namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Cell {
  int n_users, n_tasks, r;
};

struct CellResult {
  std::vector<ResultRow> rows;
  std::string error;  // nonempty when the seed scan ran dry
};

CellResult run_cell(const SweepSpec& spec, const Cell& cell) {
  CellResult result;
  Scenario scenario = spec.base;
  scenario.n_users = cell.n_users;
  scenario.n_tasks = cell.n_tasks;
  scenario.r_override = cell.r;
  scenario.seed = spec.base_seed;

  int found = 0, attempts = 0;
  while (found < spec.seeds && attempts < spec.max_attempts) {
    AuctionInstance inst;
    bool feasible = true;
    try {
      inst = generate_scenario(scenario);
    } catch (const InfeasibleScenario&) {
      feasible = false;
    }
    ++attempts;
    const std::uint64_t used_seed = scenario.seed;
    ++scenario.seed;
    if (!feasible) continue;
    ++found;

    const bool want_csopt = spec.algo == "csopt" || spec.algo == "both";
    const bool want_gssum = spec.algo == "gssum" || spec.algo == "both";
    if (want_csopt) {
      const auto start = std::chrono::steady_clock::now();
      const AuctionOutcome outcome = run_csopt(inst, cell.r);
      result.rows.push_back({"csopt", cell.n_users, cell.n_tasks, cell.r, used_seed,
                             outcome.total_payment, outcome.total_cost, elapsed_seconds(start)});
    }
    if (want_gssum) {
      const auto start = std::chrono::steady_clock::now();
      const AuctionOutcome outcome = run_gssum(inst, cell.r, spec.gssum_score);
      result.rows.push_back({"gssum", cell.n_users, cell.n_tasks, cell.r, used_seed,
                             outcome.total_payment, outcome.total_cost, elapsed_seconds(start)});
    }
  }
  if (found < spec.seeds) {
    std::ostringstream out;
    out << "users=" << cell.n_users << " tasks=" << cell.n_tasks << " r=" << cell.r << ": only "
        << found << "/" << spec.seeds << " feasible draws in " << attempts << " attempts";
    result.error = out.str();
  }
  return result;
}

}  // namespace

ExperimentResult run_experiment(const SweepSpec& spec) {
  std::vector<Cell> cells;
  for (int u : spec.users_values)
    for (int t : spec.tasks_values)
      for (int r : spec.r_values) cells.push_back({u, t, r});

  std::vector<CellResult> results(cells.size());
  if (spec.parallel && cells.size() > 1) {
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(cells.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
          results[i] = run_cell(spec, cells[i]);
      }));
    }
    for (auto& f : futures) f.get();
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) results[i] = run_cell(spec, cells[i]);
  }

  ExperimentResult out;
  for (CellResult& cell : results) {
    std::move(cell.rows.begin(), cell.rows.end(), std::back_inserter(out.rows));
    if (!cell.error.empty()) out.errors.push_back(cell.error);
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.algorithm, a.n_users, a.n_tasks, a.r, a.seed) <
           std::tie(b.algorithm, b.n_users, b.n_tasks, b.r, b.seed);
  });
  return out;
}

std::vector<Aggregate> aggregate_rows(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, int, int, int>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& row : rows)
    groups[{row.algorithm, row.n_users, row.n_tasks, row.r}].push_back(&row);

  std::vector<Aggregate> aggregates;
  for (const auto& [key, members] : groups) {
    Aggregate agg;
    std::tie(agg.algorithm, agg.n_users, agg.n_tasks, agg.r) = key;
    agg.count = static_cast<int>(members.size());
    double sum = 0.0, sum_sq = 0.0, runtime = 0.0;
    for (const ResultRow* row : members) {
      const double p = to_double(row->total_payment);
      sum += p;
      sum_sq += p * p;
      runtime += row->runtime_s;
    }
    agg.mean_payment = sum / agg.count;
    agg.mean_runtime = runtime / agg.count;
    if (agg.count > 1) {
      const double var =
          std::max(0.0, (sum_sq - sum * sum / agg.count) / (agg.count - 1));
      agg.stderr_payment = std::sqrt(var / agg.count);
    }
    aggregates.push_back(std::move(agg));
  }
  return aggregates;
}

TrendCheck check_direction(const std::vector<Aggregate>& ordered, int direction) {
  TrendCheck check;
  for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
    const Aggregate& a = ordered[i];
    const Aggregate& b = ordered[i + 1];
    const double diff = b.mean_payment - a.mean_payment;
    const double se = std::sqrt(a.stderr_payment * a.stderr_payment +
                                b.stderr_payment * b.stderr_payment);
    const bool violated = direction < 0 ? diff > 2.0 * se : diff < -2.0 * se;
    if (violated) {
      std::ostringstream out;
      out << a.algorithm << " payment moves " << (diff > 0 ? "+" : "") << diff << " (2se=" << 2 * se
          << ") from users=" << a.n_users << ",tasks=" << a.n_tasks << ",r=" << a.r
          << " to users=" << b.n_users << ",tasks=" << b.n_tasks << ",r=" << b.r;
      check.passed = false;
      check.detail = out.str();
      return check;
    }
  }
  return check;
}

std::vector<ResultRow> bench_timing(const std::vector<std::pair<int, int>>& sizes,
                                    const Scenario& base, std::uint64_t base_seed) {
  std::vector<ResultRow> rows;
  for (const auto& [users, tasks] : sizes) {
    Scenario scenario = base;
    scenario.n_users = users;
    scenario.n_tasks = tasks;
    scenario.seed = base_seed;
    std::uint64_t used_seed = base_seed;
    const AuctionInstance inst = generate_feasible_scenario(scenario, 1000, &used_seed);
    const int r = scenario_repeat_factor(scenario);
    const auto start = std::chrono::steady_clock::now();
    const AuctionOutcome outcome = run_csopt(inst, r);
    rows.push_back({"csopt", users, tasks, r, used_seed, outcome.total_payment,
                    outcome.total_cost, elapsed_seconds(start)});
  }
  return rows;
}

}  // namespace crowdsense
