#include "steinpp_tools/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "steinpp/bounds.hpp"
#include "steinpp/carrier.hpp"
#include "steinpp/imdeath.hpp"
#include "steinpp/metrics.hpp"
#include "steinpp/models.hpp"
#include "steinpp/palm.hpp"
#include "steinpp/rng.hpp"
#include "steinpp/univariate.hpp"

namespace steinpp::checks {
namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

/// Deterministic hash-driven value in [-1, 1], used as an arbitrary test
/// function of (atom, configuration).
double pseudo_value(std::uint64_t salt, int atom, const CountConfig& c) {
  std::uint64_t h = mix64(salt ^ mix64(static_cast<std::uint64_t>(atom) + 0x51u));
  for (int v : c) h = mix64(h ^ (static_cast<std::uint64_t>(v) + 0x9e37u));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
}

Configuration random_config(Rng& rng, const CarrierSpace& space, int size) {
  Configuration out;
  for (int i = 0; i < size; ++i) {
    switch (space.kind()) {
      case CarrierSpace::Kind::Interval:
        out.add(Point::at(rng.uniform()));
        break;
      case CarrierSpace::Kind::Cube:
        out.add(Point::at(rng.uniform(), rng.uniform()));
        break;
      case CarrierSpace::Kind::FiniteAtoms:
        out.add(Point::atom_index(static_cast<int>(rng.uniform_index(space.atom_count()))));
        break;
      case CarrierSpace::Kind::Lifted:
        out.add(Point::labelled(static_cast<int>(rng.uniform_index(space.label_count())),
                                Point::at(rng.uniform())));
        break;
    }
  }
  return out;
}

/// Minimum over all bijections of the column-ordered cost sum; same summation
/// order as the assignment solver so optimal values compare exactly.
double brute_matching(const CostMatrix& cost) {
  const int n = cost.n;
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += cost.at(rows[c], c);
    best = std::min(best, s);
  } while (std::next_permutation(rows.begin(), rows.end()));
  return best;
}

double brute_rho1(const Configuration& a, const Configuration& b, const CarrierSpace& space) {
  if (a.size() != b.size()) return 1.0;
  if (a.size() == 0) return 0.0;
  return brute_matching(pairwise_cost(a, b, space)) / a.size();
}

double brute_d1_prime(const Configuration& a, const Configuration& b, const CarrierSpace& space) {
  const Configuration& big = a.size() >= b.size() ? a : b;
  const Configuration& small = a.size() >= b.size() ? b : a;
  const int m = big.size();
  const int n = small.size();
  if (n == 0) return static_cast<double>(m);
  const CostMatrix cost = pairwise_cost(big, small, space);
  std::vector<int> rows(m);
  std::iota(rows.begin(), rows.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += cost.at(rows[c], c);
    best = std::min(best, s);
  } while (std::next_permutation(rows.begin(), rows.end()));
  return best + (m - n);
}

/// Empirical total variation against a reference pmf, together with the
/// deterministic standard error of the empirical TV under that reference
/// (binomial cell noise, overflow bucket included).
std::pair<double, double> empirical_tv(const std::vector<long long>& hist, long long reps,
                                       const PmfTable& ref) {
  double tv = 0.0;
  double se = 0.0;
  const int cells = static_cast<int>(ref.p.size());
  for (int w = 0; w < cells; ++w) {
    const double q = static_cast<double>(w < static_cast<int>(hist.size()) ? hist[w] : 0) / reps;
    tv += std::fabs(q - ref.p[w]);
    se += std::sqrt(ref.p[w] * (1.0 - ref.p[w]) / reps);
  }
  long long over = 0;
  for (std::size_t w = cells; w < hist.size(); ++w) over += hist[w];
  tv += std::fabs(static_cast<double>(over) / reps - ref.tail_mass);
  se += std::sqrt(ref.tail_mass * (1.0 - ref.tail_mass) / reps);
  return {0.5 * tv, 0.5 * se};
}

}  // namespace

CheckResult check_stein_equation_exactness() {
  Timer timer;
  CheckResult out;
  out.name = "stein-equation-exactness";
  double worst_residual = 0.0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool pass = true;
  for (double lambda : {0.5, 1.0, 2.0, 5.0}) {
    const DeltaBoundReport rep = check_delta_bound(lambda, 10);
    worst_residual = std::max(worst_residual, rep.max_residual);
    worst_excess = std::max(worst_excess, rep.max_delta - rep.bound);
    pass = pass && rep.max_residual <= 1e-12 && rep.max_delta <= rep.bound + 1e-10;
  }
  out.pass = pass;
  out.detail = "4 rates x 2048 subsets of {0..10}: max identity residual " + fmt(worst_residual) +
               " (tol 1e-12), max first-difference excess over (1-e^-L)/L " + fmt(worst_excess) +
               " (tol 1e-10), " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_total_variation_dominance() {
  Timer timer;
  CheckResult out;
  out.name = "total-variation-dominance";
  Rng rng(derive_seed(2, 0));
  int violations = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000; ++t) {
    BernoulliVector bv;
    const int n = 1 + static_cast<int>(rng.uniform_index(12));
    for (int i = 0; i < n; ++i) bv.p.push_back(rng.uniform(0.05, 0.45));
    const PmfTable w = poisson_binomial_pmf(bv);
    const PmfTable po = poisson_pmf(bv.lambda());
    const double dtv = total_variation(w, po);
    if (dtv > dtv_bound_independent(bv) + 1e-12) ++violations;
    min_ratio = std::min(min_ratio, dtv / bv.sum_p_squared());
  }
  out.pass = violations == 0 && min_ratio >= 0.01;
  out.detail = "1000 indicator vectors (n <= 12): " + std::to_string(violations) +
               " bound violations, min d_TV / sum p^2 ratio " + fmt(min_ratio) + " (floor 0.01), " +
               fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_path_estimator_matches_recursion() {
  Timer timer;
  CheckResult out;
  out.name = "path-estimator-matches-recursion";
  Rng pick(derive_seed(3, 0));
  const double rates[4] = {0.5, 1.0, 2.0, 5.0};
  bool pass = true;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    const double lambda = rates[pick.uniform_index(4)];
    const std::uint64_t bits = pick.bits() & 0x7ff;
    const bool cofinal = pick.bernoulli(0.5);
    const CountSet a = CountSet::from_bits(bits, 10, cofinal);
    const int w = 1 + static_cast<int>(pick.uniform_index(8));
    const SteinSolutionTable table = stein_solution_recursive(a, lambda, 12);
    const ProbabilisticSolution est =
        stein_solution_probabilistic(a, lambda, w, 100000, 30.0, derive_seed(3, 100 + k));
    const double allowance = 3.0 * est.se + est.truncation_bound;
    const double gap = std::fabs(est.estimate - table.f[w]) - allowance;
    worst_gap = std::max(worst_gap, gap);
    pass = pass && gap <= 0.0;
  }
  out.pass = pass;
  out.detail = "20 (set, rate, argument) triples at 1e5 paths each: worst |estimate - exact| minus "
               "(3 SE + e^-30) is " +
               fmt(worst_gap) + " (must be <= 0), " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_matching_metric_oracles() {
  Timer timer;
  CheckResult out;
  out.name = "matching-metric-oracles";
  const std::vector<CarrierSpace> spaces = {
      CarrierSpace::interval(), CarrierSpace::cube(2),
      CarrierSpace::finite_atoms_on_interval({0.0, 0.25, 0.5, 0.875}),
      CarrierSpace::lifted(3, CarrierSpace::interval())};
  Rng rng(derive_seed(4, 0));
  int mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    const CarrierSpace& space = spaces[t % spaces.size()];
    const int na = static_cast<int>(rng.uniform_index(7));
    const int nb = rng.bernoulli(0.5) ? na : static_cast<int>(rng.uniform_index(7));
    const Configuration a = random_config(rng, space, na);
    const Configuration b = random_config(rng, space, nb);
    if (rho1(a, b, space) != brute_rho1(a, b, space)) ++mismatches;
    if (d1_prime(a, b, space) != brute_d1_prime(a, b, space)) ++mismatches;
  }
  int axiom_violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const CarrierSpace& space = spaces[t % spaces.size()];
    const Configuration a = random_config(rng, space, static_cast<int>(rng.uniform_index(6)));
    const Configuration b = random_config(rng, space, static_cast<int>(rng.uniform_index(6)));
    const Configuration c = random_config(rng, space, static_cast<int>(rng.uniform_index(6)));
    const double rab = rho1(a, b, space);
    const double rba = rho1(b, a, space);
    const double rac = rho1(a, c, space);
    const double rbc = rho1(b, c, space);
    if (std::fabs(rab - rba) > 1e-12) ++axiom_violations;
    if (rac > rab + rbc + 1e-12) ++axiom_violations;
    if (rab < 0.0 || rab > 1.0 || rho1(a, a, space) != 0.0) ++axiom_violations;
    const double dab = d1_prime(a, b, space);
    const double dba = d1_prime(b, a, space);
    const double dac = d1_prime(a, c, space);
    const double dbc = d1_prime(b, c, space);
    if (std::fabs(dab - dba) > 1e-12) ++axiom_violations;
    if (dac > dab + dbc + 1e-12) ++axiom_violations;
    if (dab < std::abs(a.size() - b.size()) || d1_prime(a, a, space) != 0.0) ++axiom_violations;
  }
  out.pass = mismatches == 0 && axiom_violations == 0;
  out.detail = "10000 pairs (<= 6 points) vs exhaustive matchings: " + std::to_string(mismatches) +
               " exact mismatches; 10000 triples: " + std::to_string(axiom_violations) +
               " metric-axiom violations (tol 1e-12), " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_palm_identities() {
  Timer timer;
  CheckResult out;
  out.name = "palm-identities";
  Rng rng(derive_seed(5, 0));
  const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval({0.15, 0.35, 0.6, 0.9});
  double max_campbell = 0.0;
  for (int t = 0; t < 100; ++t) {
    ConfigDistribution d;
    d.carrier = carrier;
    const int support = 3 + static_cast<int>(rng.uniform_index(6));
    double total = 0.0;
    for (int k = 0; k < support; ++k) {
      CountConfig c(4);
      for (int a = 0; a < 4; ++a) c[a] = static_cast<int>(rng.uniform_index(4));
      const double p = 0.1 + rng.uniform();
      d.probs[c] += p;
      total += p;
    }
    for (auto& [c, p] : d.probs) p /= total;
    d.validate();
    const std::uint64_t salt = rng.bits();
    const auto f = [salt](int atom, const CountConfig& c) { return pseudo_value(salt, atom, c); };
    const auto [lhs, rhs] = campbell_check(d, f);
    max_campbell = std::max(max_campbell, std::fabs(lhs - rhs));
  }

  const CarrierSpace carrier3 = CarrierSpace::finite_atoms_on_interval({0.2, 0.5, 0.8});
  const std::vector<double> means = {0.7, 0.4, 1.1};
  double worst_palm_gap = -std::numeric_limits<double>::infinity();
  for (int cap : {2, 8}) {
    const std::vector<int> caps(3, cap);
    const ConfigDistribution d = truncated_poisson_dist(carrier3, means, caps);
    for (int a = 0; a < 3; ++a) {
      std::vector<int> lowered = caps;
      lowered[a] -= 1;
      const ConfigDistribution ref = truncated_poisson_dist(carrier3, means, lowered);
      const double tv = config_tv(palm(d, a), shift_up(ref, a));
      worst_palm_gap = std::max(worst_palm_gap, tv - ref.truncated_mass);
    }
  }
  out.pass = max_campbell <= 1e-10 && worst_palm_gap <= 1e-12;
  out.detail = "100 random laws: max Campbell gap " + fmt(max_campbell) +
               " (tol 1e-10); capped product-Poisson Palm vs shifted law: max TV minus truncated mass " +
               fmt(worst_palm_gap) + " (tol 1e-12), " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_bound_dominance() {
  Timer timer;
  CheckResult out;
  out.name = "bound-dominance";
  Rng rng(derive_seed(6, 0));
  int violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_interval = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_index(3));
    BernoulliVector bv;
    std::vector<double> positions;
    for (int i = 0; i < n; ++i) {
      bv.p.push_back(rng.uniform(0.05, 0.4));
      positions.push_back((i + 1.0) / (n + 1.0));
    }
    const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval(positions);
    const ConfigDistribution d = bernoulli_process_dist(carrier, bv.p);
    std::vector<int> caps;
    for (double p : bv.p) caps.push_back(poisson_cap_for_tail(p, 1e-10));
    const ConfigDistribution po = truncated_poisson_dist(carrier, bv.p, caps, 2e-9);
    const TransportDistance d2 = exact_d2(d, po);
    const BoundReport rep = independent_bernoulli_bound(bv);
    const double sharp = rep.term("sharp");
    const double crude = rep.term("crude");
    max_interval = std::max(max_interval, d2.interval);
    if (d2.interval >= 1e-8) ++violations;
    if (d2.value > sharp + d2.interval + 1e-12) ++violations;
    if (sharp > crude + 1e-12) ++violations;
    min_margin = std::min(min_margin, sharp - d2.value);
  }

  const std::vector<double> g1 = {0.06, 0.05, 0.04, 0.03, 0.02, 0.02};
  const std::vector<double> f1 = {0.15, 0.12, 0.10, 0.08, 0.06, 0.05};
  const std::vector<double> g2 = {0.05, 0.04, 0.03, 0.03, 0.02, 0.02};
  const std::vector<double> f2 = {0.20, 0.15, 0.10, 0.05, 0.05, 0.04};
  const ConfigDistribution r1 = discrete_renewal_dist(g1, f1, 6);
  const ConfigDistribution r2 = discrete_renewal_dist(g2, f2, 6);
  const ConfigDistribution sup = convolve(r1, r2, 4e-6);
  const BoundReport rep = superposition_bound({r1, r2});
  const std::vector<double> u1 = discrete_renewal_intensity(g1, f1, 6);
  const std::vector<double> u2 = discrete_renewal_intensity(g2, f2, 6);
  std::vector<double> means(6);
  std::vector<int> caps(6);
  for (int a = 0; a < 6; ++a) {
    means[a] = u1[a] + u2[a];
    caps[a] = poisson_cap_for_tail(means[a], 1e-10);
  }
  const ConfigDistribution po = truncated_poisson_dist(r1.carrier, means, caps, 2e-6);
  const TransportDistance d2 = exact_d2(sup, po);
  const double renewal_margin = rep.value + rep.interval + d2.interval - d2.value;
  const bool renewal_ok = rep.valid && renewal_margin >= -1e-12;

  out.pass = violations == 0 && renewal_ok;
  out.detail = "20 indicator laws (n <= 4): " + std::to_string(violations) +
               " dominance violations, min sharp-bound margin " + fmt(min_margin) +
               ", max transport interval " + fmt(max_interval) +
               "; two-stream renewal superposition on 6 slots: distance " + fmt(d2.value) +
               " vs bound " + fmt(rep.value) + " (margin " + fmt(renewal_margin) + "), " +
               fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_reduction_to_independent_bound() {
  Timer timer;
  CheckResult out;
  out.name = "reduction-to-independent-bound";
  Rng rng(derive_seed(7, 0));
  std::vector<std::vector<double>> cases = {
      {0.2, 0.0, 0.3, 0.1, 0.25},
      {0.3, 0.25, 0.2, 0.15, 0.1, 0.05},
  };
  {
    std::vector<double> p;
    for (int i = 0; i < 5; ++i) p.push_back(rng.uniform(0.02, 0.45));
    cases.push_back(p);
  }
  double max_diff = 0.0;
  for (const std::vector<double>& p : cases) {
    const int n = static_cast<int>(p.size());
    std::vector<double> positions;
    std::vector<std::vector<int>> singletons;
    for (int i = 0; i < n; ++i) {
      positions.push_back((i + 1.0) / (n + 1.0));
      singletons.push_back({i});
    }
    const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval(positions);
    const ConfigDistribution d = bernoulli_process_dist(carrier, p);
    const BoundReport general = local_dependence_bound(d, singletons);
    const BoundReport indep = independent_bernoulli_bound(BernoulliVector{p});
    max_diff = std::max(max_diff, std::fabs(general.value - indep.value));
  }
  out.pass = max_diff <= 1e-10;
  out.detail = "3 indicator vectors with singleton neighborhoods: max |general - independent| = " +
               fmt(max_diff) + " (tol 1e-10), " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_second_difference_envelope() {
  Timer timer;
  CheckResult out;
  out.name = "second-difference-envelope";
  Rng rng(derive_seed(8, 0));
  const int sizes[4] = {0, 1, 3, 8};
  bool pass = true;
  double min_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 50; ++t) {
    const int k = 1 + t % 5;
    std::vector<double> positions;
    std::vector<double> masses;
    for (int j = 0; j < k; ++j) {
      positions.push_back((j + 0.5 + 0.3 * (rng.uniform() - 0.5)) / k);
      masses.push_back(rng.uniform(0.3, 1.5));
    }
    const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval(positions);
    const SpatialIntensity intensity = SpatialIntensity::discrete(carrier, masses);
    Configuration xi;
    for (int j = 0; j < sizes[t % 4]; ++j)
      xi.add(Point::atom_index(static_cast<int>(rng.uniform_index(k))));
    const Point alpha = Point::atom_index(static_cast<int>(rng.uniform_index(k)));
    const Point beta = Point::atom_index(static_cast<int>(rng.uniform_index(k)));
    const Configuration anchor = sample_poisson_process(intensity, derive_seed(8, 1000 + t));
    const AnchorTestFunction h(carrier, anchor);
    const McEstimate est =
        estimate_second_difference(h, xi, alpha, beta, intensity, 15.0, 4000, derive_seed(8, 2000 + t));
    const double bound = stein_factor_bound(intensity.total(), xi.size());
    const double margin = bound + 3.0 * est.se + 4.0 * std::exp(-30.0) - std::fabs(est.estimate);
    min_margin = std::min(min_margin, margin);
    pass = pass && margin >= 0.0;
  }
  out.pass = pass;
  out.detail = "50 sampled second differences (4000 paths each): min envelope margin " + fmt(min_margin) +
               " (must be >= 0), " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_immigration_death_stationarity() {
  Timer timer;
  CheckResult out;
  out.name = "immigration-death-stationarity";
  const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval({0.2, 0.5, 0.8});
  const double weights[3] = {0.5, 0.3, 0.2};
  bool pass = true;
  std::string worst;
  double worst_ratio = 0.0;
  for (double lambda : {1.0, 4.0}) {
    std::vector<double> masses;
    for (double w : weights) masses.push_back(lambda * w);
    const SpatialIntensity intensity = SpatialIntensity::discrete(carrier, masses);
    Configuration xi0;
    for (int i = 0; i < 5; ++i) xi0.add(Point::atom_index(2));
    const long long reps = 100000;
    const int cap = poisson_cap_for_tail(lambda, 1e-9);
    std::vector<long long> total_hist(cap + 2, 0);
    std::vector<std::vector<long long>> atom_hist(3);
    std::vector<int> atom_cap(3);
    for (int a = 0; a < 3; ++a) {
      atom_cap[a] = poisson_cap_for_tail(masses[a], 1e-9);
      atom_hist[a].assign(atom_cap[a] + 2, 0);
    }
    const std::uint64_t master = derive_seed(9, lambda == 1.0 ? 1 : 2);
    for (long long rep = 0; rep < reps; ++rep) {
      const SpatialTrajectory traj = simulate_spatial_imdeath(xi0, intensity, 30.0, derive_seed(master, rep));
      const int n = traj.final_config.size();
      ++total_hist[std::min(n, cap + 1)];
      int counts[3] = {0, 0, 0};
      for (const Point& p : traj.final_config.points) ++counts[p.atom];
      for (int a = 0; a < 3; ++a) ++atom_hist[a][std::min(counts[a], atom_cap[a] + 1)];
    }
    const auto [tv_total, se_total] = empirical_tv(total_hist, reps, poisson_pmf(lambda, cap));
    if (tv_total > 3.0 * se_total) pass = false;
    if (se_total > 0.0 && tv_total / se_total > worst_ratio) {
      worst_ratio = tv_total / se_total;
      worst = "total count at rate " + fmt(lambda);
    }
    for (int a = 0; a < 3; ++a) {
      const auto [tv_a, se_a] = empirical_tv(atom_hist[a], reps, poisson_pmf(masses[a], atom_cap[a]));
      if (tv_a > 3.0 * se_a) pass = false;
      if (se_a > 0.0 && tv_a / se_a > worst_ratio) {
        worst_ratio = tv_a / se_a;
        worst = "atom " + std::to_string(a) + " at rate " + fmt(lambda);
      }
    }
  }
  out.pass = pass;
  out.detail = "1e5 paths to horizon 30 at rates {1, 4}: worst empirical-TV over SE ratio " +
               fmt(worst_ratio) + " (" + worst + ", gate 3), " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_hard_core_model() {
  Timer timer;
  CheckResult out;
  out.name = "hard-core-model";
  bool pass = true;
  std::vector<std::string> notes;

  const MaternSpec line{40.0, 0.03, 1};
  const MaternSpec plane{30.0, 0.05, 2};
  int separation_violations = 0;
  for (int s = 0; s < 200; ++s) {
    const auto [parent, thin] = sample_matern(line, derive_seed(10, s));
    for (int i = 0; i < thin.size(); ++i)
      for (int j = i + 1; j < thin.size(); ++j) {
        double dx = thin.points[i].coord[0] - thin.points[j].coord[0];
        if (std::fabs(dx) <= line.r) ++separation_violations;
      }
  }
  for (int s = 0; s < 100; ++s) {
    const auto [parent, thin] = sample_matern(plane, derive_seed(10, 1000 + s));
    for (int i = 0; i < thin.size(); ++i)
      for (int j = i + 1; j < thin.size(); ++j) {
        const double dx = thin.points[i].coord[0] - thin.points[j].coord[0];
        const double dy = thin.points[i].coord[1] - thin.points[j].coord[1];
        if (std::hypot(dx, dy) <= plane.r) ++separation_violations;
      }
  }
  if (separation_violations > 0) pass = false;
  notes.push_back(std::to_string(separation_violations) + " pair-separation violations");

  const long long reps = 20000;
  for (double x : {0.5, 0.01}) {
    const double target =
        std::exp(-line.nu() * ball_cube_intersection_volume(line.r, Point::at(x), 1));
    long long retained = 0;
    for (long long s = 0; s < reps; ++s) {
      const auto [parent, thin] = sample_matern(line, derive_seed(10, 5000 + s));
      bool clear = true;
      for (const Point& p : parent.points)
        if (std::fabs(p.coord[0] - x) <= line.r) clear = false;
      if (clear) ++retained;
    }
    const double phat = static_cast<double>(retained) / reps;
    const double se = std::sqrt(target * (1.0 - target) / reps);
    if (std::fabs(phat - target) > 3.0 * se) pass = false;
    notes.push_back("retention at " + fmt(x) + ": " + fmt(phat) + " vs " + fmt(target) + " (3 SE " +
                    fmt(3.0 * se) + ")");
  }

  const Point alpha = Point::at(0.5);
  double sum_x = 0.0, sumsq_x = 0.0, fac_x = 0.0, facsq_x = 0.0;
  double sum_y = 0.0, sumsq_y = 0.0, fac_y = 0.0, facsq_y = 0.0;
  int palm_violations = 0;
  for (long long s = 0; s < reps; ++s) {
    const Configuration px = sample_matern_reduced_palm(line, alpha, derive_seed(10, 40000 + s));
    int cx = 0;
    for (const Point& p : px.points) {
      if (std::fabs(p.coord[0] - 0.5) <= line.r) ++palm_violations;
      if (std::fabs(p.coord[0] - 0.5) > 2.0 * line.r) ++cx;
    }
    sum_x += cx;
    sumsq_x += static_cast<double>(cx) * cx;
    fac_x += static_cast<double>(cx) * (cx - 1);
    facsq_x += static_cast<double>(cx) * (cx - 1) * cx * (cx - 1);
    const Configuration py = sample_matern(line, derive_seed(10, 70000 + s)).second;
    int cy = 0;
    for (const Point& p : py.points)
      if (std::fabs(p.coord[0] - 0.5) > 2.0 * line.r) ++cy;
    sum_y += cy;
    sumsq_y += static_cast<double>(cy) * cy;
    fac_y += static_cast<double>(cy) * (cy - 1);
    facsq_y += static_cast<double>(cy) * (cy - 1) * cy * (cy - 1);
  }
  if (palm_violations > 0) pass = false;
  const double n = static_cast<double>(reps);
  const double mean_gap = std::fabs(sum_x / n - sum_y / n);
  const double mean_se = std::sqrt((sumsq_x / n - (sum_x / n) * (sum_x / n)) / n +
                                   (sumsq_y / n - (sum_y / n) * (sum_y / n)) / n);
  const double fac_gap = std::fabs(fac_x / n - fac_y / n);
  const double fac_se = std::sqrt((facsq_x / n - (fac_x / n) * (fac_x / n)) / n +
                                  (facsq_y / n - (fac_y / n) * (fac_y / n)) / n);
  if (mean_gap > 3.0 * mean_se || fac_gap > 3.0 * fac_se) pass = false;
  notes.push_back("conditional-law count mean gap " + fmt(mean_gap) + " (3 SE " + fmt(3.0 * mean_se) +
                  "), pair-moment gap " + fmt(fac_gap) + " (3 SE " + fmt(3.0 * fac_se) + "), " +
                  std::to_string(palm_violations) + " conditioning-ball intrusions");

  const MaternScalingStudy study =
      matern_scaling_study(50.0, 1, {0.0002, 0.0004, 0.0008, 0.0016}, 2000, derive_seed(10, 999));
  if (!(study.slope >= 0.8 && study.slope <= 1.2)) pass = false;
  notes.push_back("clustering-bound log-log slope " + fmt(study.slope) + " (window [0.8, 1.2])");

  out.pass = pass;
  std::string joined;
  for (const std::string& s : notes) joined += (joined.empty() ? "" : "; ") + s;
  out.detail = joined + ", " + fmt(timer.seconds()) + "s";
  return out;
}

CheckResult check_renewal_bound_arithmetic() {
  Timer timer;
  CheckResult out;
  out.name = "renewal-bound-arithmetic";
  const BoundReport two = renewal_superposition_bound({0.1, 0.1}, {0.1, 0.1});
  const BoundReport one = renewal_superposition_bound({0.1}, {0.1});
  const bool two_ok = two.valid && std::fabs(two.value - 5.0) <= 1e-9;
  const bool one_ok = !one.valid && !one.invalid_reason.empty();
  out.pass = two_ok && one_ok;
  out.detail = "two symmetric streams: value " + fmt(two.value) + " (target 5 within 1e-9); single stream: " +
               (one.valid ? "unexpectedly valid" : "invalid (" + one.invalid_reason + ")") + ", " +
               fmt(timer.seconds()) + "s";
  return out;
}

std::vector<CheckResult> run_all_checks() {
  std::vector<CheckResult> out;
  for (int i = 1; i <= 11; ++i) out.push_back(run_check(i));
  return out;
}

CheckResult run_check(int index) {
  switch (index) {
    case 1: return check_stein_equation_exactness();
    case 2: return check_total_variation_dominance();
    case 3: return check_path_estimator_matches_recursion();
    case 4: return check_matching_metric_oracles();
    case 5: return check_palm_identities();
    case 6: return check_bound_dominance();
    case 7: return check_reduction_to_independent_bound();
    case 8: return check_second_difference_envelope();
    case 9: return check_immigration_death_stationarity();
    case 10: return check_hard_core_model();
    case 11: return check_renewal_bound_arithmetic();
    default: throw std::out_of_range("run_check: index must lie in 1..11");
  }
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "univariate") return {1, 2, 3};
  if (suite == "metrics") return {4};
  if (suite == "palm") return {5};
  if (suite == "imdeath") return {8, 9};
  if (suite == "models") return {10};
  if (suite == "bounds") return {6, 7, 11};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  throw ConfigError("unknown verification suite: " + suite);
}

}  // namespace steinpp::checks
