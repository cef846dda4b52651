#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "steinpp/carrier.hpp"
#include "steinpp/errors.hpp"
#include "steinpp/rng.hpp"

namespace steinpp {

/// Hard-core thinning of a uniform Poisson parent on the unit interval or
/// square: every parent point within distance r of another parent point is
/// deleted, whether or not that other point is itself deleted.
struct MaternSpec {
  double mu = 0.0;  // parent mean total count; the unit volume makes this the intensity
  double r = 0.0;
  int d = 1;
  void validate() const;
  double nu() const { return mu; }
};

/// Parent sample and its thinned layer, in that order.
std::pair<Configuration, Configuration> sample_matern(const MaternSpec& spec, std::uint64_t seed);

/// Volume of the radius-r ball around x clipped to the unit cube; exact for
/// d = 1, deterministic quadrature of chord lengths for d = 2.
double ball_cube_intersection_volume(double r, const Point& x, int d);

/// Intensity density of the thinned layer: nu * exp(-nu * Vol(B(x, r) cut to
/// the domain)), the parent density times the void probability of the
/// deletion ball.
double matern_intensity_density(const MaternSpec& spec, const Point& x);

/// Deterministic quadrature of the intensity density over the domain.
double matern_total_intensity(const MaternSpec& spec);

/// Reduced Palm sample of the thinned process at alpha: the parent process
/// conditioned on alpha's retention is the parent restricted outside the
/// radius-r ball around alpha, the deletion rule then acts among those
/// parents, and alpha itself is removed. Every returned point is farther than
/// r from alpha.
Configuration sample_matern_reduced_palm(const MaternSpec& spec, const Point& alpha, std::uint64_t seed);

/// Joint law of n indicator variables with marks attached independently.
class MarkedBernoulliSpec {
 public:
  enum class Marks { FixedGrid, Uniform };

  static MarkedBernoulliSpec independent(std::vector<double> p, Marks marks);
  /// Explicit joint table over indicator patterns; pattern index uses bit i
  /// for indicator i.
  static MarkedBernoulliSpec table(std::vector<double> joint, std::vector<std::vector<int>> neighborhoods,
                                   Marks marks);
  /// Window-dependent indicators built from shared latent uniforms: indicator
  /// i looks at latents i..i+m, so indicators further than m apart are
  /// independent; marginal probabilities p are preserved exactly.
  static MarkedBernoulliSpec m_dependent(std::vector<double> p, int m, Marks marks);

  int n() const { return n_; }
  Marks marks() const { return marks_; }
  const std::vector<std::vector<int>>& neighborhoods() const { return neighborhoods_; }
  const std::vector<double>& marginal_p() const { return p_; }
  /// Explicit 2^n joint table; built on demand for the independent variant,
  /// unavailable for the latent-window variant.
  std::vector<double> joint_table() const;
  bool has_joint_table() const;

  std::vector<char> sample_indicators(Rng& rng) const;
  /// Mark of indicator i: (i+1)/n on the fixed grid, uniform otherwise.
  Point mark_location(int i, Rng& rng) const;

 private:
  enum class Law { Independent, Table, MDependent };
  MarkedBernoulliSpec() = default;
  Law law_ = Law::Independent;
  int n_ = 0;
  int m_ = 0;
  Marks marks_ = Marks::FixedGrid;
  std::vector<double> p_;
  std::vector<double> q_;      // per-indicator latent thresholds (window variant)
  std::vector<double> joint_;  // 2^n table (table variant)
  std::vector<std::vector<int>> neighborhoods_;
};

struct MarkedBernoulliSample {
  std::vector<char> indicators;
  std::vector<Point> marks;  // all n marks, drawn for every indicator
  Configuration base;        // points of the indicators that fired
  Configuration lifted;      // same points with their labels kept, always simple
};

MarkedBernoulliSample sample_marked_bernoulli(const MarkedBernoulliSpec& spec, std::uint64_t seed);

/// Arrival increment distribution: exponential, or integer slot gaps.
class ArrivalDist {
 public:
  static ArrivalDist exponential(double rate);
  /// Mass on gaps 1..m; a total below 1 means the arrival may never happen.
  static ArrivalDist discrete_slots(std::vector<double> pmf);

  bool is_discrete() const { return discrete_; }
  /// One increment; +infinity when a defective distribution never arrives.
  double sample(Rng& rng) const;
  double cdf(double t) const;
  const std::vector<double>& slot_pmf() const;

 private:
  ArrivalDist() = default;
  bool discrete_ = false;
  double rate_ = 0.0;
  std::vector<double> pmf_;
};

struct RenewalSpec {
  ArrivalDist first;  // law of the first arrival time
  ArrivalDist gap;    // law of later inter-arrival times
  double horizon = 0.0;
  void validate() const;
};

/// Arrival times up to the horizon, embedded into [0,1] by dividing by the
/// horizon (slot t of a discrete spec lands at t/horizon).
Configuration sample_renewal(const RenewalSpec& spec, Rng& rng);
Configuration sample_renewal(const RenewalSpec& spec, std::uint64_t seed);

/// Multiset union of component samples; components with the same group id
/// share one random stream, components in different groups draw from
/// independent streams derived from the seed.
Configuration sample_superposition(const std::vector<RenewalSpec>& specs, const std::vector<int>& groups,
                                   std::uint64_t seed);

/// CSV dump with a label column (empty for unlabelled points) and one column
/// per coordinate; finite-atom points print their atom index.
std::string configuration_csv(const Configuration& config);

}  // namespace steinpp
