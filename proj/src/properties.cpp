#include "crowdsense/properties.hpp"

#include "crowdsense/csopt.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace crowdsense {
namespace {

std::string describe_bid(const Bid& bid) {
  std::ostringstream out;
  out << "user " << bid.user_id << " cost " << to_string(bid.cost_per_task) << " tasks {";
  for (std::size_t i = 0; i < bid.task_ids.size(); ++i)
    out << (i ? "," : "") << bid.task_ids[i];
  out << "}";
  return out.str();
}

// Nonempty subsets of `pool` with at most `max_size` elements.
std::vector<std::vector<int>> enumerate_subsets(const std::vector<int>& pool,
                                                std::size_t max_size) {
  std::vector<std::vector<int>> out;
  const std::size_t n = pool.size();
  if (n <= 20) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_size) continue;
      std::vector<int> subset;
      for (std::size_t b = 0; b < n; ++b)
        if (mask & (1u << b)) subset.push_back(pool[b]);
      out.push_back(std::move(subset));
    }
  }
  return out;
}

}  // namespace

TypeDistribution uniform_distribution(const Rational& lower, const Rational& upper) {
  if (!(lower < upper)) throw std::invalid_argument("need lower < upper");
  TypeDistribution dist;
  dist.lower = lower;
  dist.upper = upper;
  const Rational width = upper - lower;
  dist.density = [lower, upper, width](const Rational& c, int) {
    return (c < lower || c > upper) ? Rational(0) : Rational(1) / width;
  };
  dist.cumulative = [lower, upper, width](const Rational& c, int) {
    if (c <= lower) return Rational(0);
    if (c >= upper) return Rational(1);
    return (c - lower) / width;
  };
  return dist;
}

PropertyReport check_dsic(const AuctionInstance& inst, const DeviationGrid& grid) {
  PropertyReport report;
  report.property = "dsic";

  const int r = repeat_factor(inst.alpha, inst.beta);
  const AuctionOutcome truthful = run_csopt(inst, r);

  Rational worst_gap(0);
  for (std::size_t i = 0; i < inst.bids.size(); ++i) {
    const Bid& true_bid = inst.bids[i];
    const Rational true_utility = bidder_utility(truthful, true_bid.user_id, true_bid.cost_per_task);

    std::vector<std::vector<int>> subsets =
        enumerate_subsets(true_bid.task_ids, grid.max_subset_size);
    if (std::find(subsets.begin(), subsets.end(), true_bid.task_ids) == subsets.end())
      subsets.push_back(true_bid.task_ids);

    for (const auto& subset : subsets) {
      for (const Rational& reported : grid.cost_values) {
        if (reported == true_bid.cost_per_task && subset == true_bid.task_ids) continue;
        AuctionInstance deviated = inst;
        deviated.bids[i].cost_per_task = reported;
        deviated.bids[i].task_ids = subset;
        AuctionOutcome outcome;
        try {
          outcome = run_csopt(deviated, r);
        } catch (const CompetitionViolation&) {
          ++report.skipped;
          continue;
        } catch (const InfeasibleInstance&) {
          ++report.skipped;
          continue;
        }
        ++report.trials;
        const Rational deviated_utility =
            bidder_utility(outcome, true_bid.user_id, true_bid.cost_per_task);
        if (deviated_utility > true_utility && deviated_utility - true_utility > worst_gap) {
          report.passed = false;
          worst_gap = deviated_utility - true_utility;
          std::ostringstream out;
          out << describe_bid(true_bid) << " gains " << to_string(worst_gap) << " by reporting cost "
              << to_string(reported) << " with " << subset.size() << " tasks";
          report.counterexample = out.str();
        }
      }
    }
  }
  return report;
}

PropertyReport check_ir(const AuctionInstance& inst) {
  PropertyReport report;
  report.property = "individual_rationality";
  const AuctionOutcome outcome = run_csopt(inst);
  for (const Bid& bid : inst.bids) {
    ++report.trials;
    const Rational surplus = bidder_utility(outcome, bid.user_id, bid.cost_per_task);
    if (surplus < Rational(0)) {
      report.passed = false;
      report.counterexample = describe_bid(bid) + " has surplus " + to_string(surplus);
      return report;
    }
  }
  return report;
}

PropertyReport check_payment_integral(const AuctionInstance& inst) {
  PropertyReport report;
  report.property = "payment_integral";

  const int r = repeat_factor(inst.alpha, inst.beta);
  const AuctionOutcome outcome = run_csopt(inst, r);

  for (const Bid& bid : inst.bids) {
    const std::size_t n_true = outcome.assigned_count(bid.user_id);
    if (n_true == 0) continue;
    ++report.trials;
    const Rational surplus = outcome.payment(bid.user_id) -
                             bid.cost_per_task * Rational(static_cast<std::int64_t>(n_true));

    // n_i as a function of the reported cost only changes where the sort order
    // does, i.e. at competitor costs; midpoints give the value on each open
    // segment exactly.
    std::set<Rational> cuts;
    cuts.insert(bid.cost_per_task);
    for (const Bid& other : inst.bids)
      if (other.user_id != bid.user_id && other.cost_per_task >= bid.cost_per_task)
        cuts.insert(other.cost_per_task);

    const std::vector<Rational> points(cuts.begin(), cuts.end());
    const std::size_t tail =
        assigned_count_at_cost(inst, r, bid.user_id, points.back() + Rational(1));
    if (tail != 0) {
      report.passed = false;
      report.counterexample =
          describe_bid(bid) + " still assigned above every competitor cost";
      return report;
    }

    Rational integral(0);
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
      const Rational mid = (points[k] + points[k + 1]) / Rational(2);
      const std::size_t n_mid = assigned_count_at_cost(inst, r, bid.user_id, mid);
      integral += Rational(static_cast<std::int64_t>(n_mid)) * (points[k + 1] - points[k]);
    }

    if (integral != surplus) {
      report.passed = false;
      report.counterexample = describe_bid(bid) + " surplus " + to_string(surplus) +
                              " != step integral " + to_string(integral);
      return report;
    }
  }
  return report;
}

Rational virtual_cost(const TypeDistribution& dist, const Rational& c, int k) {
  const Rational f = dist.density(c, k);
  if (f == Rational(0)) throw ZeroDensity();
  return c + dist.cumulative(c, k) / f;
}

PropertyReport check_regularity(const TypeDistribution& dist,
                                const std::vector<Rational>& cost_grid,
                                const std::vector<int>& capacity_grid) {
  PropertyReport report;
  report.property = "regularity";
  for (int k : capacity_grid) {
    for (std::size_t i = 0; i + 1 < cost_grid.size(); ++i) {
      ++report.trials;
      const Rational lo = virtual_cost(dist, cost_grid[i], k);
      const Rational hi = virtual_cost(dist, cost_grid[i + 1], k);
      if (hi < lo) {
        report.passed = false;
        report.counterexample = "virtual cost drops from " + to_string(lo) + " to " +
                                to_string(hi) + " between costs " + to_string(cost_grid[i]) +
                                " and " + to_string(cost_grid[i + 1]);
        return report;
      }
    }
  }
  for (const Rational& c : cost_grid) {
    for (std::size_t i = 0; i + 1 < capacity_grid.size(); ++i) {
      ++report.trials;
      const Rational lo = virtual_cost(dist, c, capacity_grid[i]);
      const Rational hi = virtual_cost(dist, c, capacity_grid[i + 1]);
      if (hi > lo) {
        report.passed = false;
        report.counterexample = "virtual cost rises from " + to_string(lo) + " to " +
                                to_string(hi) + " between capacities " +
                                std::to_string(capacity_grid[i]) + " and " +
                                std::to_string(capacity_grid[i + 1]) + " at cost " + to_string(c);
        return report;
      }
    }
  }
  return report;
}

PropertyReport check_monotone_expected_assignment(
    const std::function<AuctionInstance(std::uint64_t)>& sample_instance, int focal_user, int r,
    const std::vector<Rational>& cost_values, int samples, std::uint64_t seed) {
  PropertyReport report;
  report.property = "monotone_expected_assignment";
  if (cost_values.size() < 2 || samples < 1) {
    report.counterexample = "grid or sample budget too small";
    report.passed = false;
    return report;
  }

  // counts[s][j]: focal user's assignment count in trial s at cost_values[j].
  std::vector<std::vector<double>> counts(samples, std::vector<double>(cost_values.size(), 0.0));
  for (int s = 0; s < samples; ++s) {
    const AuctionInstance inst = sample_instance(seed + static_cast<std::uint64_t>(s));
    for (std::size_t j = 0; j < cost_values.size(); ++j)
      counts[s][j] =
          static_cast<double>(assigned_count_at_cost(inst, r, focal_user, cost_values[j]));
  }

  for (std::size_t j = 0; j + 1 < cost_values.size(); ++j) {
    ++report.trials;
    double mean = 0.0, mean_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double d = counts[s][j + 1] - counts[s][j];  // paired per profile
      mean += d;
      mean_sq += d * d;
    }
    mean /= samples;
    const double variance = std::max(0.0, mean_sq / samples - mean * mean);
    const double stderr_mean = std::sqrt(variance / samples);
    if (mean > 2.0 * stderr_mean) {
      report.passed = false;
      std::ostringstream out;
      out << "mean assignment count rises by " << mean << " (stderr " << stderr_mean
          << ") from cost " << to_string(cost_values[j]) << " to "
          << to_string(cost_values[j + 1]);
      report.counterexample = out.str();
      return report;
    }
  }
  return report;
}

}  // namespace crowdsense
