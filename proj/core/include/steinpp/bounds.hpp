#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "steinpp/errors.hpp"
#include "steinpp/models.hpp"
#include "steinpp/palm.hpp"
#include "steinpp/univariate.hpp"

namespace steinpp {

struct BoundTerm {
  std::string name;
  double value = 0.0;
  double se = 0.0;
};

/// One evaluated error bound: the headline value, its component terms, and
/// whether the formula was applicable at all. Invalid results are ordinary
/// values so parameter sweeps can record them.
struct BoundReport {
  double value = 0.0;
  bool valid = true;
  std::string invalid_reason;
  double interval = 0.0;  // width contributed by truncated mass
  std::vector<BoundTerm> terms;
  std::string mode = "exact";
  std::vector<std::string> warnings;

  const BoundTerm* find(const std::string& name) const;
  double term(const std::string& name) const;
  std::string to_json() const;
};

/// Independent Bernoulli indicators: the sharp form
/// sum p_i^2 (3.5/lambda + 2.5 E[1/(sum_{j != i} X_j + 1)]) with the
/// reciprocal expectation computed exactly, and the crude closed form
/// 6 sum p_i^2 / (lambda - max p_i). The report's value is the sharp form;
/// the crude term is marked invalid when its denominator is not positive.
BoundReport independent_bernoulli_bound(const BernoulliVector& p);

/// Locally dependent process on a finite carrier, exact evaluation: the
/// self-interaction term sums (count in the neighborhood minus one) against
/// the size-dependent factor, and the intensity-product term integrates the
/// factor under the Palm distributions over neighborhood pairs.
BoundReport local_dependence_bound(const ConfigDistribution& D,
                                   const std::vector<std::vector<int>>& neighborhoods);

/// Hard-core process, Monte Carlo evaluation with neighborhoods of twice the
/// deletion radius; the intensity-product term draws the outer location from
/// the normalized intensity and the inner location uniformly in the
/// neighborhood, with the reduced Palm count estimated by nested sampling.
BoundReport matern_local_dependence_bound(const MaternSpec& spec, int reps, std::uint64_t seed);

/// Locally dependent indicators with attached marks, exact evaluation from
/// the explicit joint table: the realized-pair sum over neighborhoods plus
/// the conditional-factor product sum. Null conditioning events contribute
/// only the unconditional part of the factor, with a warning.
BoundReport dependent_indicator_bound(const MarkedBernoulliSpec& spec);

/// Monte Carlo variant for specs without an explicit joint table.
BoundReport dependent_indicator_bound_mc(const MarkedBernoulliSpec& spec, int reps, std::uint64_t seed);

/// Superposition of independent components given by exact laws on a common
/// carrier, with singleton neighborhoods: the coupling term vanishes, and the
/// Palm term pairs each component with its reduced Palm law at every atom
/// under the cost-minimizing coupling of the unbalanced matching distance.
BoundReport superposition_bound(const std::vector<ConfigDistribution>& components);

/// Joint samplers for the Monte Carlo superposition bound: each call returns
/// a coupled pair (component law, its Palm variant at the atom).
struct SuperpositionCoupling {
  std::function<std::pair<CountConfig, CountConfig>(int component, int atom, Rng&)> component_pair;
  std::function<std::pair<CountConfig, CountConfig>(int component, int atom, Rng&)> neighbor_pair;
};

/// Monte Carlo superposition bound under a user-supplied coupling; both
/// samplers are required.
BoundReport superposition_bound_mc(const std::vector<ConfigDistribution>& components,
                                   const SuperpositionCoupling& coupling, int reps, std::uint64_t seed);

/// Closed-form renewal superposition bound from the first-arrival and
/// inter-arrival distribution functions evaluated at the horizon. Invalid
/// when any F value reaches 1 or the denominator is not positive.
BoundReport renewal_superposition_bound(const std::vector<double>& g_vals, const std::vector<double>& f_vals);

struct MaternScalingStudy {
  std::vector<double> r;
  std::vector<double> bound_value;
  std::vector<double> bound_se;
  std::vector<BoundReport> reports;
  double slope = 0.0;
};

/// Monte Carlo bound at each radius with a log-log least-squares slope; the
/// slope should track the domain dimension.
MaternScalingStudy matern_scaling_study(double nu, int d, const std::vector<double>& r_grid, int reps,
                                        std::uint64_t seed);

}  // namespace steinpp
