#ifndef STEINPP_PALM_HPP
#define STEINPP_PALM_HPP

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "steinpp/carrier.hpp"
#include "steinpp/univariate.hpp"

namespace steinpp {

/// Counts per atom of a finite carrier.
using CountConfig = std::vector<int>;

int config_total(const CountConfig& c);
Configuration expand_counts(const CountConfig& c);

/// Exact distribution of a point process on a finite carrier, stored as an
/// ordered map from count configurations to probabilities. Mass dropped by a
/// truncated construction is carried in truncated_mass, never renormalized
/// away silently.
struct ConfigDistribution {
  CarrierSpace carrier = CarrierSpace::finite_atoms({{0.0}});
  std::map<CountConfig, double> probs;
  double truncated_mass = 0.0;

  int atoms() const { return carrier.atom_count(); }
  double prob(const CountConfig& c) const;
  double explicit_mass() const;
  void validate() const;
};

/// Mean measure lambda(a) = E[Xi(a)], one entry per atom (explicit support only).
std::vector<double> intensity(const ConfigDistribution& D);
double total_intensity(const ConfigDistribution& D);

/// Palm distribution at an atom: Q_a(xi) = P(xi) xi(a) / lambda(a). Output is
/// normalized exactly to total mass one over its explicit support.
/// Throws PalmUndefinedError when lambda(a) = 0.
ConfigDistribution palm(const ConfigDistribution& D, int atom);

/// Palm distribution with the conditioning point removed (shift down at atom).
ConfigDistribution reduced_palm(const ConfigDistribution& D, int atom);

/// Distribution of Xi + delta_atom (support shifted up at the atom).
ConfigDistribution shift_up(const ConfigDistribution& D, int atom);

/// Both sides of the Campbell formula for f(atom, configuration):
///   lhs = E sum_a f(a, Xi) Xi(a),  rhs = sum_a lambda(a) E_palm(a)[f(a, .)].
std::pair<double, double> campbell_check(const ConfigDistribution& D,
                                         const std::function<double(int, const CountConfig&)>& f);

/// E[Df(Xi)] for Df(xi) = sum_a lambda(a) f(a, xi + delta_a) - sum_a xi(a) f(a, xi),
/// with lambda = intensity(D). Zero for every f exactly when D is Poisson.
double d_operator_expectation(const ConfigDistribution& D,
                              const std::function<double(int, const CountConfig&)>& f);

struct LocalDependenceReport {
  bool local = false;            // max_discrepancy <= tol
  double max_discrepancy = 0.0;  // worst TV over atoms with positive intensity
  int worst_atom = -1;
};

/// Checks that outside each neighborhood A_a the process restricted to the
/// complement has the same law under D and under palm(D, a). Each A_a must
/// contain a.
LocalDependenceReport local_dependence_check(const ConfigDistribution& D,
                                             const std::vector<std::vector<int>>& neighborhoods,
                                             double tol = 1e-10);

/// Law of the total point count; tail_mass = truncated_mass.
PmfTable total_count_pmf(const ConfigDistribution& D);

/// Total variation over the union of the explicit supports, the two truncated
/// masses treated as mass on distinct extra symbols.
double config_tv(const ConfigDistribution& A, const ConfigDistribution& B);

/// Product of per-atom Poisson(mean[a]) laws restricted to counts <= cap[a];
/// probabilities are the raw (unnormalized) products, the rest goes to
/// truncated_mass. An optional trim budget additionally drops the
/// lowest-probability configurations greedily while their total stays within
/// the budget. Throws ResourceError when the kept support would exceed
/// max_support.
ConfigDistribution truncated_poisson_dist(const CarrierSpace& carrier, const std::vector<double>& means,
                                          const std::vector<int>& caps, double trim_budget = 0.0,
                                          std::size_t max_support = 2'000'000);

/// Independent indicators: support {0,1}^n. Throws ResourceError for n > 20.
ConfigDistribution bernoulli_process_dist(const CarrierSpace& carrier, const std::vector<double>& p);

/// Exact law of a discrete-time renewal stream observed on slots {1..T}:
/// first arrival from `first_pmf` (mass on slots 1..m, any remainder means no
/// arrival in view), later gaps from `gap_pmf` (mass on 1..k; remainder = no
/// further arrival). Slots are embedded at positions t/T on the interval.
ConfigDistribution discrete_renewal_dist(const std::vector<double>& first_pmf,
                                         const std::vector<double>& gap_pmf, int T);

/// Expected arrivals per slot for the same renewal stream (renewal equation).
std::vector<double> discrete_renewal_intensity(const std::vector<double>& first_pmf,
                                               const std::vector<double>& gap_pmf, int T);

/// Law of the independent superposition Xi_1 + Xi_2 (same carrier required);
/// configurations whose product probability falls below the trim budget are
/// dropped into truncated_mass (greedily, smallest first).
ConfigDistribution convolve(const ConfigDistribution& A, const ConfigDistribution& B,
                            double trim_budget = 0.0, std::size_t max_support = 2'000'000);

struct TransportDistance {
  double value = 0.0;
  double interval = 0.0;  // uncertainty width from the two truncated masses
};

/// Exact Wasserstein distance between two configuration laws for an arbitrary
/// nonnegative ground cost on configurations (bounded by cost_cap, used to
/// price the truncated mass into `interval`).
TransportDistance exact_transport_distance(
    const ConfigDistribution& D1, const ConfigDistribution& D2,
    const std::function<double(const CountConfig&, const CountConfig&)>& cost, double cost_cap,
    std::size_t max_pairs = 4'000'000);

/// exact_transport_distance with the normalized matching metric as ground
/// cost: the strongest process-level distance used by the bound evaluators.
/// Average-matching distance between two count configurations over the same
/// atom space: 1 if the totals differ, otherwise the cheapest point matching
/// divided by the common total.
double rho1_counts(const CountConfig& a, const CountConfig& b, const CarrierSpace& carrier);

/// Point-process first-order distance between count configurations: cheapest
/// injective matching of the smaller into the larger plus the size gap.
double d1_prime_counts(const CountConfig& a, const CountConfig& b, const CarrierSpace& carrier);

TransportDistance exact_d2(const ConfigDistribution& D1, const ConfigDistribution& D2,
                           std::size_t max_pairs = 4'000'000);

/// Line-oriented text serialization; doubles at 17 significant digits so that
/// parse(serialize(D)) reproduces D exactly.
std::string serialize(const ConfigDistribution& D);
ConfigDistribution parse_config_distribution(const std::string& text);

}  // namespace steinpp

#endif
