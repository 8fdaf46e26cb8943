#pragma once

#include "crowdsense/auction_types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace crowdsense {

/// The deviation space explored per bidder: alternative cost reports crossed
/// with under-reported task sets. Subsets are enumerated exhaustively up to
/// `max_subset_size` tasks; the full true set is always included so pure cost
/// deviations are covered even for large bid sets.
struct DeviationGrid {
  std::vector<Rational> cost_values;  // sorted ascending, within the cost support
  std::size_t max_subset_size = 4;
};

struct ZeroDensity : std::runtime_error {
  ZeroDensity() : std::runtime_error("density is zero at the evaluation point") {}
};

/// Cost distribution F(c|k), f(c|k) over [lower, upper], optionally varying
/// with a capacity parameter k.
struct TypeDistribution {
  Rational lower;
  Rational upper;
  std::function<Rational(const Rational& c, int k)> density;
  std::function<Rational(const Rational& c, int k)> cumulative;
  int capacity_lower = 1;
  int capacity_upper = 1;
};

/// Uniform cost distribution on [lower, upper], capacity-independent.
TypeDistribution uniform_distribution(const Rational& lower, const Rational& upper);

struct PropertyReport {
  std::string property;
  bool passed = true;
  long long trials = 0;   // comparisons actually performed
  long long skipped = 0;  // deviations dropped because the auction rejected them
  std::string counterexample;  // empty when passed
};

/// No bidder can strictly gain by misreporting cost and/or under-reporting its
/// task set: utility at the true bid (payment minus true cost of assigned
/// tasks) is compared exactly against every deviation in the grid.
PropertyReport check_dsic(const AuctionInstance& inst, const DeviationGrid& grid);

/// Truthful run leaves every bidder with nonnegative surplus.
PropertyReport check_ir(const AuctionInstance& inst);

/// The surplus each assigned bidder is paid above its reported cost equals the
/// exact area under its assignment-count curve: integrating n_i(z) for reports
/// z above the truthful cost, where n_i is a step function whose breakpoints
/// can only sit at competitor costs.
PropertyReport check_payment_integral(const AuctionInstance& inst);

/// c + F(c|k)/f(c|k). Throws ZeroDensity when f(c|k) = 0.
Rational virtual_cost(const TypeDistribution& dist, const Rational& c, int k);

/// Virtual cost must be non-decreasing along the cost grid (per capacity) and
/// non-increasing along the capacity grid (per cost).
PropertyReport check_regularity(const TypeDistribution& dist,
                                const std::vector<Rational>& cost_grid,
                                const std::vector<int>& capacity_grid);

/// Draws opponent profiles with `sample_instance(trial_seed)` (the returned
/// instance must contain `focal_user`), sweeps the focal user's reported cost
/// over `cost_values`, and checks that the mean assignment count does not
/// increase with cost. Paired per-profile differences must exceed two standard
/// errors in the wrong direction to count as a failure.
PropertyReport check_monotone_expected_assignment(
    const std::function<AuctionInstance(std::uint64_t)>& sample_instance, int focal_user, int r,
    const std::vector<Rational>& cost_values, int samples, std::uint64_t seed);

}  // namespace crowdsense
