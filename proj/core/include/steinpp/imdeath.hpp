#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "steinpp/carrier.hpp"
#include "steinpp/errors.hpp"
#include "steinpp/rng.hpp"

namespace steinpp {

/// Finite intensity measure on a carrier: either explicit atom masses or a
/// density with a known supremum for rejection sampling.
class SpatialIntensity {
 public:
  static SpatialIntensity discrete(const CarrierSpace& carrier, std::vector<double> masses);
  static SpatialIntensity density(const CarrierSpace& carrier, std::function<double(const Point&)> dens,
                                  double sup_bound, double total_mass);

  const CarrierSpace& carrier() const { return carrier_; }
  bool is_discrete() const { return discrete_; }
  double total() const { return total_; }
  const std::vector<double>& masses() const;
  double density_at(const Point& x) const;
  double density_bound() const { return bound_; }

  /// One location distributed as the normalized measure.
  Point sample_location(Rng& rng) const;

 private:
  SpatialIntensity(CarrierSpace carrier, bool is_discrete)
      : carrier_(std::move(carrier)), discrete_(is_discrete) {}
  CarrierSpace carrier_;
  bool discrete_ = true;
  double total_ = 0.0;
  std::vector<double> masses_;
  std::function<double(const Point&)> dens_;
  double bound_ = 0.0;
};

Configuration sample_poisson_process(const SpatialIntensity& intensity, Rng& rng);
Configuration sample_poisson_process(const SpatialIntensity& intensity, std::uint64_t seed);

struct SpatialEvent {
  double time = 0.0;
  bool birth = false;
  Point location;       // newborn point, or the point a death removed
  int death_index = -1; // index into the live list just before a death
};

struct SpatialTrajectory {
  Configuration initial;
  double horizon = 0.0;
  std::vector<SpatialEvent> events;
  Configuration final_config;

  Configuration state_at(double t) const;
  /// CSV dump with columns time,event,location.
  std::string to_csv() const;
};

/// Event-driven immigration-death path: immigration at rate total(), unit per
/// capita death rate. Event times and the birth-or-death choice consume the
/// same random stream as simulate_count_imdeath with the same seed, so the
/// count marginal of the two simulators coincides path by path; locations and
/// death indices come from a separate stream derived from the seed.
SpatialTrajectory simulate_spatial_imdeath(const Configuration& xi0, const SpatialIntensity& intensity,
                                           double horizon, std::uint64_t seed);

using ConfigFunction = std::function<double(const Configuration&)>;

/// h(xi) = rho1(xi, anchor): 1-Lipschitz with respect to rho1 and bounded by 1.
struct AnchorTestFunction {
  CarrierSpace space;
  Configuration anchor;
  AnchorTestFunction(CarrierSpace s, Configuration a) : space(std::move(s)), anchor(std::move(a)) {}
  double operator()(const Configuration& xi) const;
};

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double truncation_bound = 0.0;
  int reps = 0;
};

/// First difference g_h(xi + delta_x) - g_h(xi) of the process Stein solution,
/// estimated on coupled paths that share the base chain; the extra point at x
/// carries an independent unit-rate exponential lifetime, so the integrand is
/// supported on [0, lifetime] and the time integral is exact between events.
/// Truncating the integral at tstar discards at most exp(-tstar).
McEstimate estimate_gh_difference(const ConfigFunction& h, const Configuration& xi, const Point& x,
                                  const SpatialIntensity& intensity, double tstar, int reps,
                                  std::uint64_t seed);

/// Second difference g_h(xi+a+b) - g_h(xi+a) - g_h(xi+b) + g_h(xi); the
/// integrand is supported on [0, min of the two extra lifetimes], and the
/// truncation at tstar discards at most exp(-2 tstar).
McEstimate estimate_second_difference(const ConfigFunction& h, const Configuration& xi, const Point& alpha,
                                      const Point& beta, const SpatialIntensity& intensity, double tstar,
                                      int reps, std::uint64_t seed);

/// Uniform bound on the second difference: 3.5/lambda + 2.5/(|xi| + 1).
double stein_factor_bound(double lambda, int xi_size);

struct SteinResidualReport {
  double residual = 0.0;
  double se = 0.0;
  double truncation_bound = 0.0;
  double generator = 0.0;
  double h_value = 0.0;
  double poisson_mean = 0.0;
};

/// Evaluates the generator of the immigration-death process applied to g_h at
/// xi (birth differences integrated against the intensity, death differences
/// summed over the points of xi) minus h(xi) - E h(Poisson process); the
/// result should vanish within the composed error bars.
SteinResidualReport stein_equation_residual(const ConfigFunction& h, const Configuration& xi,
                                            const SpatialIntensity& intensity, int reps, std::uint64_t seed,
                                            double tstar = 30.0, int density_locations = 32);

}  // namespace steinpp
