#include "steinpp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace steinpp {

namespace {

double expected_reciprocal_total(const ConfigDistribution& D) {
  double s = 0.0;
  for (const auto& [c, p] : D.probs) s += p / (config_total(c) + 1.0);
  return s;
}

int max_support_total(const ConfigDistribution& D) {
  int m = 0;
  for (const auto& [c, p] : D.probs) m = std::max(m, config_total(c));
  return m;
}

struct RunningStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double se() const {
    if (n < 2) return 0.0;
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
    return std::sqrt(var / n);
  }
};

double euclid(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coord.size(); ++i) {
    const double d = a.coord[i] - b.coord[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

const BoundTerm* BoundReport::find(const std::string& name) const {
  for (const BoundTerm& t : terms)
    if (t.name == name) return &t;
  return nullptr;
}

double BoundReport::term(const std::string& name) const {
  const BoundTerm* t = find(name);
  if (!t) throw DomainError("BoundReport: no term named " + name);
  return t->value;
}

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["value"] = value;
  j["valid"] = valid;
  if (!valid) j["invalid_reason"] = invalid_reason;
  j["interval"] = interval;
  j["mode"] = mode;
  j["terms"] = nlohmann::json::array();
  for (const BoundTerm& t : terms) j["terms"].push_back({{"name", t.name}, {"value", t.value}, {"se", t.se}});
  j["warnings"] = warnings;
  return j.dump(2);
}

BoundReport independent_bernoulli_bound(const BernoulliVector& p) {
  p.validate();
  const double lambda = p.lambda();
  BoundReport rep;
  rep.mode = "exact";

  double sharp = 0.0;
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    if (p.p[i] <= 0.0) continue;
    sharp += p.p[i] * p.p[i] * (3.5 / lambda + 2.5 * expected_reciprocal_count(p, static_cast<int>(i)));
  }
  rep.terms.push_back({"sharp", sharp, 0.0});

  const double max_p = p.p.empty() ? 0.0 : *std::max_element(p.p.begin(), p.p.end());
  if (lambda > max_p) {
    rep.terms.push_back({"crude", 6.0 * p.sum_p_squared() / (lambda - max_p), 0.0});
  } else {
    rep.terms.push_back({"crude", std::numeric_limits<double>::quiet_NaN(), 0.0});
    rep.warnings.push_back("crude form invalid: total mean does not exceed the largest probability");
  }
  rep.value = sharp;
  return rep;
}

BoundReport local_dependence_bound(const ConfigDistribution& D,
                                   const std::vector<std::vector<int>>& neighborhoods) {
  D.validate();
  if (static_cast<int>(neighborhoods.size()) != D.atoms())
    throw DomainError("local_dependence_bound: need one neighborhood per atom");
  const std::vector<double> lam = intensity(D);
  double lambda = 0.0;
  for (double x : lam) lambda += x;

  BoundReport rep;
  rep.mode = "exact";
  if (lambda <= 0.0) {
    rep.valid = false;
    rep.invalid_reason = "zero total intensity";
    return rep;
  }

  const LocalDependenceReport check = local_dependence_check(D, neighborhoods, 1e-9);
  if (!check.local)
    rep.warnings.push_back("local dependence violated at declared neighborhoods (max restricted TV " +
                           std::to_string(check.max_discrepancy) + ")");

  std::vector<std::vector<char>> inside(D.atoms(), std::vector<char>(D.atoms(), 0));
  for (int a = 0; a < D.atoms(); ++a) {
    for (int b : neighborhoods[a]) {
      if (b < 0 || b >= D.atoms()) throw DomainError("local_dependence_bound: neighborhood atom out of range");
      inside[a][b] = 1;
    }
    if (!inside[a][a]) throw DomainError("local_dependence_bound: each neighborhood must contain its own atom");
  }

  double term1 = 0.0;
  for (const auto& [c, prob] : D.probs) {
    double inner = 0.0;
    for (int a = 0; a < D.atoms(); ++a) {
      if (c[a] == 0) continue;
      int in_count = 0;
      int out_count = 0;
      for (int b = 0; b < D.atoms(); ++b) (inside[a][b] ? in_count : out_count) += c[b];
      inner += c[a] * (in_count - 1) * (3.5 / lambda + 2.5 / (out_count + 1.0));
    }
    term1 += prob * inner;
  }

  double term2 = 0.0;
  for (int b = 0; b < D.atoms(); ++b) {
    if (lam[b] <= 0.0) continue;
    const ConfigDistribution pb = palm(D, b);
    for (int a = 0; a < D.atoms(); ++a) {
      if (!inside[a][b] || lam[a] <= 0.0) continue;
      double factor = 0.0;
      for (const auto& [c, prob] : pb.probs) {
        int out_count = 0;
        for (int x = 0; x < D.atoms(); ++x)
          if (!inside[a][x]) out_count += c[x];
        factor += prob * (3.5 / lambda + 2.5 / (out_count + 1.0));
      }
      term2 += lam[a] * lam[b] * factor;
    }
  }

  rep.terms.push_back({"self_interaction", term1, 0.0});
  rep.terms.push_back({"intensity_product", term2, 0.0});
  rep.value = term1 + term2;
  rep.interval = D.truncated_mass;
  return rep;
}

BoundReport matern_local_dependence_bound(const MaternSpec& spec, int reps, std::uint64_t seed) {
  spec.validate();
  if (reps < 2) throw DomainError("matern_local_dependence_bound: need at least 2 replications");
  const double lambda = matern_total_intensity(spec);
  BoundReport rep;
  rep.mode = "monte-carlo";
  if (lambda <= 0.0) {
    rep.valid = false;
    rep.invalid_reason = "zero total intensity";
    return rep;
  }
  const double r2 = 2.0 * spec.r;

  RunningStats term1;
  for (int k = 0; k < reps; ++k) {
    const Configuration thinned = sample_matern(spec, derive_seed(seed, 2 * static_cast<std::uint64_t>(k))).second;
    double v = 0.0;
    for (std::size_t i = 0; i < thinned.points.size(); ++i) {
      int in_count = 0;
      for (std::size_t j = 0; j < thinned.points.size(); ++j)
        if (euclid(thinned.points[i], thinned.points[j]) <= r2) ++in_count;
      const int out_count = static_cast<int>(thinned.points.size()) - in_count;
      v += (in_count - 1) * (3.5 / lambda + 2.5 / (out_count + 1.0));
    }
    term1.add(v);
  }

  constexpr int kInnerReps = 20;
  RunningStats term2;
  for (int k = 0; k < reps; ++k) {
    Rng rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(k) + 1));
    // Outer location from the normalized intensity by rejection under the
    // parent density.
    Point alpha;
    for (;;) {
      alpha = spec.d == 1 ? Point::at(rng.uniform()) : Point::at(rng.uniform(), rng.uniform());
      if (rng.uniform() * spec.nu() <= matern_intensity_density(spec, alpha)) break;
    }
    const double window_vol = ball_cube_intersection_volume(r2, alpha, spec.d);
    // Inner location uniform on the neighborhood ball clipped to the domain.
    Point beta;
    if (spec.d == 1) {
      const double lo = std::max(alpha.coord[0] - r2, 0.0);
      const double hi = std::min(alpha.coord[0] + r2, 1.0);
      beta = Point::at(rng.uniform(lo, hi));
    } else {
      const double lo0 = std::max(alpha.coord[0] - r2, 0.0), hi0 = std::min(alpha.coord[0] + r2, 1.0);
      const double lo1 = std::max(alpha.coord[1] - r2, 0.0), hi1 = std::min(alpha.coord[1] + r2, 1.0);
      for (;;) {
        beta = Point::at(rng.uniform(lo0, hi0), rng.uniform(lo1, hi1));
        if (euclid(beta, alpha) <= r2) break;
      }
    }
    double reciprocal = 0.0;
    for (int inner = 0; inner < kInnerReps; ++inner) {
      const Configuration palm_sample =
          sample_matern_reduced_palm(spec, beta, derive_seed(seed ^ 0x70616c6dull, static_cast<std::uint64_t>(k) * kInnerReps + inner));
      int out_count = 0;
      for (const Point& q : palm_sample.points)
        if (euclid(q, alpha) > r2) ++out_count;
      reciprocal += 1.0 / (out_count + 1.0);
    }
    reciprocal /= kInnerReps;
    const double g = 3.5 / lambda + 2.5 * reciprocal;
    term2.add(lambda * window_vol * matern_intensity_density(spec, beta) * g);
  }

  rep.terms.push_back({"self_interaction", term1.mean(), term1.se()});
  rep.terms.push_back({"intensity_product", term2.mean(), term2.se()});
  rep.value = term1.mean() + term2.mean();
  return rep;
}

namespace {

BoundReport indicator_bound_common(const MarkedBernoulliSpec& spec, bool exact, int reps, std::uint64_t seed) {
  const std::vector<double>& p = spec.marginal_p();
  double lambda = 0.0;
  for (double x : p) lambda += x;
  BoundReport rep;
  rep.mode = exact ? "exact" : "monte-carlo";
  if (lambda <= 0.0) {
    rep.valid = false;
    rep.invalid_reason = "zero total intensity";
    return rep;
  }
  const int n = spec.n();
  const auto& nb = spec.neighborhoods();
  std::vector<std::vector<char>> inside(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j : nb[i]) inside[i][j] = 1;

  double realized = 0.0, realized_se = 0.0;
  // conditional_mean[i][j] approximates E[2.5/(V_i+1) | I_j = 1].
  std::vector<std::vector<double>> conditional_mean(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> conditional_se(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<char>> conditional_defined(n, std::vector<char>(n, 0));

  if (exact) {
    const std::vector<double> joint = spec.joint_table();
    std::vector<std::vector<double>> cond_sum(n, std::vector<double>(n, 0.0));
    for (std::size_t pattern = 0; pattern < joint.size(); ++pattern) {
      const double prob = joint[pattern];
      if (prob == 0.0) continue;
      std::vector<int> v(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (!inside[i][j] && ((pattern >> j) & 1u)) ++v[i];
      for (int i = 0; i < n; ++i) {
        if (!((pattern >> i) & 1u)) continue;
        const double factor = 3.5 / lambda + 2.5 / (v[i] + 1.0);
        for (int j : nb[i])
          if (j != i && ((pattern >> j) & 1u)) realized += prob * factor;
      }
      for (int i = 0; i < n; ++i)
        for (int j : nb[i])
          if ((pattern >> j) & 1u) cond_sum[i][j] += prob * 2.5 / (v[i] + 1.0);
    }
    for (int i = 0; i < n; ++i)
      for (int j : nb[i])
        if (p[j] > 0.0) {
          conditional_mean[i][j] = cond_sum[i][j] / p[j];
          conditional_defined[i][j] = 1;
        }
  } else {
    RunningStats realized_stats;
    std::vector<std::vector<RunningStats>> cond(n, std::vector<RunningStats>(n));
    Rng rng(seed);
    for (int k = 0; k < reps; ++k) {
      const std::vector<char> ind = spec.sample_indicators(rng);
      std::vector<int> v(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (!inside[i][j] && ind[j]) ++v[i];
      double val = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!ind[i]) continue;
        const double factor = 3.5 / lambda + 2.5 / (v[i] + 1.0);
        for (int j : nb[i])
          if (j != i && ind[j]) val += factor;
      }
      realized_stats.add(val);
      for (int i = 0; i < n; ++i)
        for (int j : nb[i])
          if (ind[j]) cond[i][j].add(2.5 / (v[i] + 1.0));
    }
    realized = realized_stats.mean();
    realized_se = realized_stats.se();
    for (int i = 0; i < n; ++i)
      for (int j : nb[i])
        if (cond[i][j].n > 0) {
          conditional_mean[i][j] = cond[i][j].mean();
          conditional_se[i][j] = cond[i][j].se();
          conditional_defined[i][j] = 1;
        }
  }

  double product = 0.0;
  double product_var = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j : nb[i]) {
      if (conditional_defined[i][j]) {
        product += p[i] * p[j] * (3.5 / lambda + conditional_mean[i][j]);
        product_var += p[i] * p[j] * conditional_se[i][j] * p[i] * p[j] * conditional_se[i][j];
      } else {
        product += p[i] * p[j] * (3.5 / lambda);
        rep.warnings.push_back("conditioning event for pair (" + std::to_string(i) + "," + std::to_string(j) +
                               ") has no mass; conditional part dropped");
      }
    }

  rep.terms.push_back({"realized_pairs", realized, realized_se});
  rep.terms.push_back({"probability_product", product, std::sqrt(product_var)});
  rep.value = realized + product;
  return rep;
}

}  // namespace

BoundReport dependent_indicator_bound(const MarkedBernoulliSpec& spec) {
  if (!spec.has_joint_table())
    throw DomainError("dependent_indicator_bound: no explicit joint table; use the Monte Carlo variant");
  return indicator_bound_common(spec, true, 0, 0);
}

BoundReport dependent_indicator_bound_mc(const MarkedBernoulliSpec& spec, int reps, std::uint64_t seed) {
  if (reps < 2) throw DomainError("dependent_indicator_bound_mc: need at least 2 replications");
  return indicator_bound_common(spec, false, reps, seed);
}

BoundReport superposition_bound(const std::vector<ConfigDistribution>& components) {
  if (components.empty()) throw DomainError("superposition_bound: need at least one component");
  for (const ConfigDistribution& D : components) D.validate();
  const int k = components.front().atoms();
  for (const ConfigDistribution& D : components)
    if (D.atoms() != k) throw DomainError("superposition_bound: components live on different carriers");

  std::vector<std::vector<double>> lam_i;
  double lambda = 0.0;
  for (const ConfigDistribution& D : components) {
    lam_i.push_back(intensity(D));
    for (double x : lam_i.back()) lambda += x;
  }

  BoundReport rep;
  rep.mode = "exact";
  if (lambda <= 0.0) {
    rep.valid = false;
    rep.invalid_reason = "zero total intensity";
    return rep;
  }
  rep.warnings.push_back("independent components with singleton neighborhoods: coupling term is identically zero");

  double palm_term = 0.0;
  double interval = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    // Law of the rest of the superposition, for the size-dependent factor.
    ConfigDistribution rest;
    rest.carrier = components.front().carrier;
    rest.probs[CountConfig(k, 0)] = 1.0;
    rest.truncated_mass = 0.0;
    for (std::size_t j = 0; j < components.size(); ++j)
      if (j != i) rest = convolve(rest, components[j]);
    const double factor = 3.5 / lambda + 2.5 * expected_reciprocal_total(rest);

    double palm_sum = 0.0;
    double transport_slack = 0.0;
    const int cap = max_support_total(components[i]);
    for (int a = 0; a < k; ++a) {
      if (lam_i[i][a] <= 0.0) continue;
      const ConfigDistribution rp = reduced_palm(components[i], a);
      const CarrierSpace& carrier = components[i].carrier;
      const TransportDistance w = exact_transport_distance(
          components[i], rp,
          [&carrier](const CountConfig& x, const CountConfig& y) { return d1_prime_counts(x, y, carrier); },
          static_cast<double>(cap + 1), 4'000'000);
      palm_sum += lam_i[i][a] * w.value;
      transport_slack += lam_i[i][a] * w.interval;
    }
    palm_term += factor * palm_sum;
    // Truncated mass in `rest` biases the reciprocal factor by at most 2.5
    // times that mass; truncated component mass widens each transport value.
    interval += 2.5 * rest.truncated_mass * palm_sum + factor * transport_slack;
  }

  rep.terms.push_back({"coupling", 0.0, 0.0});
  rep.terms.push_back({"palm", palm_term, 0.0});
  rep.value = palm_term;
  rep.interval = interval;
  return rep;
}

BoundReport superposition_bound_mc(const std::vector<ConfigDistribution>& components,
                                   const SuperpositionCoupling& coupling, int reps, std::uint64_t seed) {
  if (components.empty()) throw DomainError("superposition_bound_mc: need at least one component");
  if (!coupling.component_pair || !coupling.neighbor_pair)
    throw ConfigError("superposition_bound_mc: both coupling samplers are required");
  if (reps < 2) throw DomainError("superposition_bound_mc: need at least 2 replications");
  for (const ConfigDistribution& D : components) D.validate();
  const int k = components.front().atoms();
  for (const ConfigDistribution& D : components)
    if (D.atoms() != k) throw DomainError("superposition_bound_mc: components live on different carriers");

  std::vector<std::vector<double>> lam_i;
  double lambda = 0.0;
  for (const ConfigDistribution& D : components) {
    lam_i.push_back(intensity(D));
    for (double x : lam_i.back()) lambda += x;
  }
  BoundReport rep;
  rep.mode = "monte-carlo";
  if (lambda <= 0.0) {
    rep.valid = false;
    rep.invalid_reason = "zero total intensity";
    return rep;
  }

  double coupling_term = 0.0, coupling_var = 0.0;
  double palm_term = 0.0, palm_var = 0.0;
  const CarrierSpace& carrier = components.front().carrier;
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    ConfigDistribution rest;
    rest.carrier = carrier;
    rest.probs[CountConfig(k, 0)] = 1.0;
    rest.truncated_mass = 0.0;
    for (std::size_t j = 0; j < components.size(); ++j)
      if (j != i) rest = convolve(rest, components[j]);
    const double factor = 3.5 / lambda + 2.5 * expected_reciprocal_total(rest);

    for (int a = 0; a < k; ++a) {
      if (lam_i[i][a] <= 0.0) continue;
      Rng rng(derive_seed(seed, stream++));
      RunningStats v_stats, xi_stats;
      for (int rpt = 0; rpt < reps; ++rpt) {
        const auto [v1, v2] = coupling.neighbor_pair(static_cast<int>(i), a, rng);
        v_stats.add(d1_prime_counts(v1, v2, carrier));
        const auto [x1, x2] = coupling.component_pair(static_cast<int>(i), a, rng);
        xi_stats.add(d1_prime_counts(x1, x2, carrier));
      }
      coupling_term += factor * lam_i[i][a] * v_stats.mean();
      coupling_var += factor * lam_i[i][a] * v_stats.se() * factor * lam_i[i][a] * v_stats.se();
      palm_term += factor * lam_i[i][a] * xi_stats.mean();
      palm_var += factor * lam_i[i][a] * xi_stats.se() * factor * lam_i[i][a] * xi_stats.se();
    }
  }
  rep.terms.push_back({"coupling", coupling_term, std::sqrt(coupling_var)});
  rep.terms.push_back({"palm", palm_term, std::sqrt(palm_var)});
  rep.value = coupling_term + palm_term;
  return rep;
}

BoundReport renewal_superposition_bound(const std::vector<double>& g_vals, const std::vector<double>& f_vals) {
  if (g_vals.size() != f_vals.size()) throw DomainError("renewal_superposition_bound: need one F per G");
  if (g_vals.empty()) throw DomainError("renewal_superposition_bound: need at least one component");
  BoundReport rep;
  rep.mode = "exact";
  for (std::size_t i = 0; i < g_vals.size(); ++i) {
    if (!(g_vals[i] >= 0.0 && g_vals[i] <= 1.0))
      throw DomainError("renewal_superposition_bound: G values must lie in [0, 1]");
    if (!(f_vals[i] >= 0.0 && f_vals[i] <= 1.0))
      throw DomainError("renewal_superposition_bound: F values must lie in [0, 1]");
    if (f_vals[i] >= 1.0) {
      rep.valid = false;
      rep.invalid_reason = "an inter-arrival distribution function reaches 1 at the horizon";
      return rep;
    }
  }
  double numerator = 0.0;
  double g_sum = 0.0;
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < g_vals.size(); ++i) {
    const double g = g_vals[i];
    const double f = f_vals[i];
    numerator += (2.0 * f + g) * g / ((1.0 - f) * (1.0 - f));
    g_sum += g;
    max_ratio = std::max(max_ratio, g / (1.0 - f));
  }
  numerator *= 6.0;
  const double denominator = g_sum - max_ratio;
  rep.terms.push_back({"numerator", numerator, 0.0});
  rep.terms.push_back({"denominator", denominator, 0.0});
  if (denominator <= 0.0) {
    rep.valid = false;
    rep.invalid_reason = "denominator is not positive: the largest component dominates the total first-arrival mass";
    return rep;
  }
  rep.value = numerator / denominator;
  return rep;
}

MaternScalingStudy matern_scaling_study(double nu, int d, const std::vector<double>& r_grid, int reps,
                                        std::uint64_t seed) {
  if (r_grid.size() < 2) throw DomainError("matern_scaling_study: need at least two radii");
  MaternScalingStudy study;
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    MaternSpec spec;
    spec.mu = nu;
    spec.r = r_grid[k];
    spec.d = d;
    const BoundReport rep = matern_local_dependence_bound(spec, reps, derive_seed(seed, 1000 + k));
    study.r.push_back(r_grid[k]);
    study.bound_value.push_back(rep.value);
    study.bound_se.push_back(rep.find("self_interaction")->se + rep.find("intensity_product")->se);
    study.reports.push_back(rep);
  }
  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < study.r.size(); ++k) {
    if (study.bound_value[k] <= 0.0) throw ResourceError("matern_scaling_study: nonpositive bound estimate");
    sx += std::log(study.r[k]);
    sy += std::log(study.bound_value[k]);
    ++n;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < study.r.size(); ++k) {
    const double dx = std::log(study.r[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(study.bound_value[k]) - my);
  }
  study.slope = sxy / sxx;
  return study;
}

}  // namespace steinpp
