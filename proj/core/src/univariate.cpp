#include "steinpp/univariate.hpp"

#include <algorithm>
#include <cmath>

#include "steinpp/rng.hpp"

namespace steinpp {

void PmfTable::validate() const {
  double sum = tail_mass;
  if (tail_mass < 0.0) throw DomainError("PmfTable: negative tail mass");
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("PmfTable: entries must be finite and >= 0");
    sum += x;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw DomainError("PmfTable: mass does not sum to 1");
}

double BernoulliVector::lambda() const {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

double BernoulliVector::sum_p_squared() const {
  double s = 0.0;
  for (double x : p) s += x * x;
  return s;
}

void BernoulliVector::validate() const {
  for (double x : p)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("BernoulliVector: probabilities must lie in [0, 1]");
}

CountSet CountSet::from_bits(std::uint64_t bits, int window, bool cofinal) {
  if (window < 0 || window > 62) throw DomainError("CountSet: window out of range");
  CountSet s;
  s.member.assign(window + 1, 0);
  for (int w = 0; w <= window; ++w) s.member[w] = (bits >> w) & 1u ? 1 : 0;
  s.cofinal = cofinal;
  return s;
}

CountSet CountSet::singleton(int w, int window) {
  CountSet s = empty(window);
  if (w < 0 || w > window) throw DomainError("CountSet: singleton outside window");
  s.member[w] = 1;
  return s;
}

CountSet CountSet::complement_of_singleton(int w, int window) {
  CountSet s;
  s.member.assign(window + 1, 1);
  if (w < 0 || w > window) throw DomainError("CountSet: singleton outside window");
  s.member[w] = 0;
  s.cofinal = true;
  return s;
}

int default_cutoff(double lambda) {
  if (lambda < 0.0) throw DomainError("default_cutoff: lambda must be >= 0");
  return static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 30.0));
}

int poisson_cap_for_tail(double mean, double eps) {
  if (mean < 0.0) throw DomainError("poisson_cap_for_tail: mean must be >= 0");
  if (!(eps > 0.0)) throw DomainError("poisson_cap_for_tail: eps must be positive");
  if (mean == 0.0) return 0;
  const int hard_limit = default_cutoff(mean) + 200;
  double term = std::exp(-mean);
  double cdf = term;
  for (int c = 0; c <= hard_limit; ++c) {
    if (1.0 - cdf <= eps) return c;
    term *= mean / (c + 1);
    cdf += term;
  }
  return hard_limit;
}

PmfTable poisson_pmf(double lambda, int N) {
  if (lambda < 0.0 || !std::isfinite(lambda)) throw DomainError("poisson_pmf: lambda must be finite and >= 0");
  if (N < 0) throw DomainError("poisson_pmf: cutoff must be >= 0");
  PmfTable t;
  t.p.resize(N + 1);
  double term = std::exp(-lambda);
  double sum = 0.0;
  for (int w = 0; w <= N; ++w) {
    t.p[w] = term;
    sum += term;
    term *= lambda / (w + 1);
  }
  t.tail_mass = std::max(0.0, 1.0 - sum);
  return t;
}

PmfTable poisson_pmf(double lambda) { return poisson_pmf(lambda, default_cutoff(lambda)); }

PmfTable poisson_binomial_pmf(const BernoulliVector& bv) {
  bv.validate();
  PmfTable t;
  t.p.assign(1, 1.0);
  for (double pi : bv.p) {
    std::vector<double> next(t.p.size() + 1, 0.0);
    for (std::size_t k = 0; k < t.p.size(); ++k) {
      next[k] += t.p[k] * (1.0 - pi);
      next[k + 1] += t.p[k] * pi;
    }
    t.p = std::move(next);
  }
  t.tail_mass = 0.0;
  return t;
}

double total_variation(const PmfTable& P, const PmfTable& Q) {
  const std::size_t n = std::max(P.p.size(), Q.p.size());
  double s = 0.0;
  for (std::size_t w = 0; w < n; ++w) s += std::fabs(P.at(static_cast<int>(w)) - Q.at(static_cast<int>(w)));
  s += std::fabs(P.tail_mass - Q.tail_mass);
  return 0.5 * s;
}

double delta_bound(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("delta_bound: lambda must be positive");
  return -std::expm1(-lambda) / lambda;
}

SteinSolutionTable stein_solution_recursive(const CountSet& A, double lambda, int N) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("stein_solution_recursive: lambda must be positive");
  if (N < 0) throw DomainError("stein_solution_recursive: cutoff must be >= 0");

  const int M = std::max(N + 1, default_cutoff(lambda));
  std::vector<double> pmf(M + 1);
  {
    double term = std::exp(-lambda);
    for (int w = 0; w <= M; ++w) {
      pmf[w] = term;
      term *= lambda / (w + 1);
    }
  }
  double explicit_sum = 0.0;
  for (int w = 0; w <= M; ++w) explicit_sum += pmf[w];
  const double tail = std::max(0.0, 1.0 - explicit_sum);

  // Prefix mass F, suffix mass T, and the same split for the target set; all
  // four are sums of positive terms, so each is accurate to relative rounding.
  std::vector<double> F(M + 1), T(M + 1), SA(M + 1), RA(M + 1);
  {
    double acc = 0.0;
    for (int w = 0; w <= M; ++w) {
      acc += pmf[w];
      F[w] = acc;
    }
    acc = tail;
    double acc_a = A.cofinal ? tail : 0.0;
    for (int w = M; w >= 0; --w) {
      T[w] = acc;
      RA[w] = acc_a;
      acc += pmf[w];
      if (A.contains(w)) acc_a += pmf[w];
    }
    acc = 0.0;
    for (int w = 0; w <= M; ++w) {
      if (A.contains(w)) acc += pmf[w];
      SA[w] = acc;
    }
  }
  const double po_a = SA[M] + (A.cofinal ? tail : 0.0);

  SteinSolutionTable out;
  out.set = A;
  out.lambda = lambda;
  out.po_a = po_a;
  out.f.assign(N + 2, 0.0);
  for (int w1 = 1; w1 <= N + 1; ++w1) {
    const int w = w1 - 1;
    if (static_cast<double>(w1) <= lambda || pmf[w] < 1e-300) {
      const double ind = A.contains(w) ? 1.0 : 0.0;
      out.f[w1] = (ind - po_a + w * out.f[w]) / lambda;
    } else {
      out.f[w1] = (SA[w] * T[w] - RA[w] * F[w]) / (lambda * pmf[w]);
    }
  }
  return out;
}

DeltaBoundReport check_delta_bound(double lambda, int N) {
  if (N < 0 || N > 20) throw DomainError("check_delta_bound: N must lie in [0, 20]");
  DeltaBoundReport rep;
  rep.lambda = lambda;
  rep.bound = delta_bound(lambda);
  const std::uint64_t subsets = 1ull << (N + 1);
  for (std::uint64_t bits = 0; bits < subsets; ++bits) {
    const CountSet A = CountSet::from_bits(bits, N);
    const SteinSolutionTable t = stein_solution_recursive(A, lambda, N);
    for (int w = 1; w <= N; ++w) rep.max_delta = std::max(rep.max_delta, std::fabs(t.f[w + 1] - t.f[w]));
    for (int w = 0; w <= N; ++w) {
      const double ind = A.contains(w) ? 1.0 : 0.0;
      const double res = lambda * t.f[w + 1] - w * t.f[w] - (ind - t.po_a);
      rep.max_residual = std::max(rep.max_residual, std::fabs(res));
    }
  }
  rep.pass = rep.max_delta <= rep.bound + 1e-10;
  return rep;
}

double stein_identity_residual(const PmfTable& P, const SteinSolutionTable& f) {
  if (P.cutoff() > f.cutoff()) throw DomainError("stein_identity_residual: pmf cutoff exceeds solution cutoff");
  double s = 0.0;
  for (int w = 0; w <= P.cutoff(); ++w) s += P.p[w] * (f.lambda * f.f[w + 1] - w * f.f[w]);
  return s;
}

double dtv_bound_independent(const BernoulliVector& bv) {
  bv.validate();
  const double lambda = bv.lambda();
  const double factor = lambda > 1.0 ? 1.0 / lambda : 1.0;
  return factor * bv.sum_p_squared();
}

double expected_reciprocal_count(const BernoulliVector& bv, int i) {
  bv.validate();
  const int n = static_cast<int>(bv.p.size());
  if (i < 0 || i >= n) throw DomainError("expected_reciprocal_count: index out of range");
  // Coefficients of prod_{j != i} ((1 - p_j) + p_j z), then integrate term by term.
  std::vector<double> coeff{1.0};
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    std::vector<double> next(coeff.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      next[k] += coeff[k] * (1.0 - bv.p[j]);
      next[k + 1] += coeff[k] * bv.p[j];
    }
    coeff = std::move(next);
  }
  double s = 0.0;
  for (std::size_t k = coeff.size(); k-- > 0;) s += coeff[k] / static_cast<double>(k + 1);
  return s;
}

int CountTrajectory::count_at(double t) const {
  int w = w0;
  for (const auto& [time, delta] : events) {
    if (time > t) break;
    w += delta;
  }
  return w;
}

CountTrajectory simulate_count_imdeath(int w0, double lambda, double horizon, std::uint64_t seed) {
  if (w0 < 0) throw DomainError("simulate_count_imdeath: initial count must be >= 0");
  if (lambda < 0.0) throw DomainError("simulate_count_imdeath: lambda must be >= 0");
  if (horizon < 0.0) throw DomainError("simulate_count_imdeath: horizon must be >= 0");
  Rng rng(seed);
  CountTrajectory traj;
  traj.w0 = w0;
  traj.horizon = horizon;
  int w = w0;
  double t = 0.0;
  while (true) {
    const double rate = lambda + w;
    if (rate <= 0.0) break;
    t += rng.exponential(rate);
    if (t > horizon) break;
    const double u = rng.uniform();
    const bool birth = w == 0 || u * rate < lambda;
    w += birth ? 1 : -1;
    traj.events.emplace_back(t, birth ? 1 : -1);
  }
  traj.final_count = w;
  return traj;
}

ProbabilisticSolution stein_solution_probabilistic(const CountSet& A, double lambda, int w, int reps,
                                                   double horizon, std::uint64_t seed) {
  if (!(lambda >= 0.0)) throw DomainError("stein_solution_probabilistic: lambda must be >= 0");
  if (w < 1) throw DomainError("stein_solution_probabilistic: w must be >= 1");
  if (reps < 2) throw DomainError("stein_solution_probabilistic: need at least 2 replications");
  if (!(horizon > 0.0)) throw DomainError("stein_solution_probabilistic: horizon must be positive");

  double sum = 0.0, sum_sq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    // Lifetime of the one uncoupled unit; the chains agree after it dies, so
    // the indicator difference is integrated only on [0, min(tau, horizon)).
    const double tau = rng.exponential(1.0);
    const double stop = std::min(tau, horizon);
    int z = w - 1;  // shared chain (the lower of the two coupled paths)
    double t = 0.0;
    double value = 0.0;
    while (t < stop) {
      const double rate = lambda + z;
      const double next = rate > 0.0 ? t + rng.exponential(rate) : horizon + 1.0;
      const double seg_end = std::min(next, stop);
      const double diff = (A.contains(z + 1) ? 1.0 : 0.0) - (A.contains(z) ? 1.0 : 0.0);
      value -= diff * (seg_end - t);
      t = next;
      if (next < stop) {
        const bool birth = z == 0 || rng.uniform() * rate < lambda;
        z += birth ? 1 : -1;
      }
    }
    sum += value;
    sum_sq += value * value;
  }
  ProbabilisticSolution out;
  out.reps = reps;
  out.estimate = sum / reps;
  const double var = std::max(0.0, (sum_sq - sum * sum / reps) / (reps - 1.0));
  out.se = std::sqrt(var / reps);
  out.truncation_bound = std::exp(-horizon);
  return out;
}

}  // namespace steinpp
