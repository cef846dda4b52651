#pragma once

#include <string>
#include <vector>

namespace steinpp::checks {

// Outcome of one self-contained correctness check.  `detail` is a one-line
// human-readable summary holding the measured quantities and the thresholds
// they were compared against.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Univariate Stein solver: the recursion satisfies its defining difference
// equation to near machine precision and the first-difference magnitude stays
// under the classical (1 - e^{-lambda})/lambda envelope, for every subset of
// {0,...,10} and several rates.
CheckResult check_stein_equation_exactness();

// Exact total variation distance between a Poisson-binomial law and the
// Poisson law of matching mean never exceeds (1 ^ 1/lambda) * sum p_i^2,
// and the bound is not vacuously loose.
CheckResult check_total_variation_dominance();

// The path-integral estimator of the Stein solution agrees with the exact
// recursion within Monte Carlo error plus the path-truncation allowance.
CheckResult check_path_estimator_matches_recursion();

// Optimal-assignment metrics agree exactly with exhaustive-permutation
// oracles on small configurations and satisfy the metric axioms.
CheckResult check_matching_metric_oracles();

// Palm distributions satisfy the Campbell identity, and the Palm law of a
// capped product-Poisson law equals the point-addition shift of the law with
// the cap at the conditioned atom lowered by one, up to its truncated mass.
CheckResult check_palm_identities();

// On small Bernoulli processes the exact transport distance to the matching
// Poisson law is dominated by the sharp independent-indicator bound, which is
// itself dominated by the crude one; the same transport distance for a
// superposition of two short discrete renewal processes is dominated by the
// exact superposition bound.
CheckResult check_bound_dominance();

// For independent marked indicators with singleton neighborhoods the general
// local-dependence bound collapses to the independent-indicator bound.
CheckResult check_reduction_to_independent_bound();

// Sampled second differences of the generator solution stay within the
// 3.5/lambda + 2.5/(|xi|+1) envelope, up to Monte Carlo error and the
// path-truncation allowance.
CheckResult check_second_difference_envelope();

// The spatial immigration-death chain started away from equilibrium is
// statistically indistinguishable from its product-Poisson stationary law
// after a long run, in total count and per-atom counts.
CheckResult check_immigration_death_stationarity();

// Hard-core thinning: pair separation is structural, retention probabilities
// match the void-probability formula, the conditional law given a retained
// point matches the unconditional one away from the conditioning site, and
// the clustering bound scales like r^d on a geometric grid of radii.
CheckResult check_hard_core_model();

// Closed-form renewal superposition bound: hand-checked value for the
// symmetric two-component case and first-class invalidity for a single
// component.
CheckResult check_renewal_bound_arithmetic();

// All checks, in a fixed order.  Index i holds criterion i+1.
std::vector<CheckResult> run_all_checks();

// Run one check by 1-based index (1..11).  Throws std::out_of_range
// otherwise.
CheckResult run_check(int index);

// Name -> indices mapping for the verification suites.  Valid suite names:
// univariate, metrics, palm, imdeath, models, bounds, all.  Throws
// steinpp::ConfigError for unknown names.
std::vector<int> suite_criteria(const std::string& suite);

}  // namespace steinpp::checks
