#include "steinpp/palm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "steinpp/metrics.hpp"
#include "steinpp/transport.hpp"

namespace steinpp {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_same_carrier(const ConfigDistribution& A, const ConfigDistribution& B, const char* who) {
  if (A.atoms() != B.atoms()) throw DomainError(std::string(who) + ": atom counts differ");
  for (int i = 0; i < A.atoms(); ++i)
    for (int j = 0; j < A.atoms(); ++j)
      if (A.carrier.atom_distance(i, j) != B.carrier.atom_distance(i, j))
        throw DomainError(std::string(who) + ": carrier metrics differ");
}

void require_finite_atoms(const CarrierSpace& carrier, const char* who) {
  if (carrier.kind() != CarrierSpace::Kind::FiniteAtoms)
    throw DomainError(std::string(who) + ": carrier must be a finite atom space");
}

/// Drops the smallest-probability configurations while their total stays
/// within `budget`; returns the dropped mass.
double greedy_trim(std::map<CountConfig, double>& probs, double budget) {
  if (budget <= 0.0) return 0.0;
  std::vector<std::pair<double, const CountConfig*>> order;
  order.reserve(probs.size());
  for (const auto& [c, p] : probs) order.emplace_back(p, &c);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return *a.second < *b.second;
  });
  double dropped = 0.0;
  std::vector<CountConfig> to_erase;
  for (const auto& [p, c] : order) {
    if (dropped + p > budget) break;
    dropped += p;
    to_erase.push_back(*c);
  }
  for (const auto& c : to_erase) probs.erase(c);
  return dropped;
}

}  // namespace

int config_total(const CountConfig& c) {
  int s = 0;
  for (int x : c) s += x;
  return s;
}

Configuration expand_counts(const CountConfig& c) {
  Configuration out;
  for (int a = 0; a < static_cast<int>(c.size()); ++a)
    for (int k = 0; k < c[a]; ++k) out.add(Point::atom_index(a));
  return out;
}

double ConfigDistribution::prob(const CountConfig& c) const {
  const auto it = probs.find(c);
  return it == probs.end() ? 0.0 : it->second;
}

double ConfigDistribution::explicit_mass() const {
  double s = 0.0;
  for (const auto& [c, p] : probs) s += p;
  return s;
}

void ConfigDistribution::validate() const {
  require_finite_atoms(carrier, "ConfigDistribution");
  if (truncated_mass < -1e-15) throw DomainError("ConfigDistribution: negative truncated mass");
  double s = truncated_mass;
  for (const auto& [c, p] : probs) {
    if (static_cast<int>(c.size()) != atoms()) throw DomainError("ConfigDistribution: config size mismatch");
    for (int x : c)
      if (x < 0) throw DomainError("ConfigDistribution: negative count");
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("ConfigDistribution: bad probability");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw DomainError("ConfigDistribution: mass does not sum to 1");
}

std::vector<double> intensity(const ConfigDistribution& D) {
  std::vector<double> lam(D.atoms(), 0.0);
  for (const auto& [c, p] : D.probs)
    for (int a = 0; a < D.atoms(); ++a) lam[a] += p * c[a];
  return lam;
}

double total_intensity(const ConfigDistribution& D) {
  double s = 0.0;
  for (double x : intensity(D)) s += x;
  return s;
}

ConfigDistribution palm(const ConfigDistribution& D, int atom) {
  if (atom < 0 || atom >= D.atoms()) throw DomainError("palm: atom out of range");
  double lam = 0.0;
  for (const auto& [c, p] : D.probs) lam += p * c[atom];
  if (lam <= 0.0) throw PalmUndefinedError("palm: zero intensity at the requested atom");
  ConfigDistribution out;
  out.carrier = D.carrier;
  out.truncated_mass = 0.0;
  for (const auto& [c, p] : D.probs)
    if (c[atom] > 0) out.probs[c] = p * c[atom] / lam;
  return out;
}

ConfigDistribution reduced_palm(const ConfigDistribution& D, int atom) {
  ConfigDistribution q = palm(D, atom);
  ConfigDistribution out;
  out.carrier = D.carrier;
  out.truncated_mass = 0.0;
  for (const auto& [c, p] : q.probs) {
    CountConfig shifted = c;
    shifted[atom] -= 1;
    out.probs[shifted] += p;
  }
  return out;
}

ConfigDistribution shift_up(const ConfigDistribution& D, int atom) {
  if (atom < 0 || atom >= D.atoms()) throw DomainError("shift_up: atom out of range");
  ConfigDistribution out;
  out.carrier = D.carrier;
  out.truncated_mass = D.truncated_mass;
  for (const auto& [c, p] : D.probs) {
    CountConfig shifted = c;
    shifted[atom] += 1;
    out.probs[shifted] += p;
  }
  return out;
}

std::pair<double, double> campbell_check(const ConfigDistribution& D,
                                         const std::function<double(int, const CountConfig&)>& f) {
  double lhs = 0.0;
  for (const auto& [c, p] : D.probs)
    for (int a = 0; a < D.atoms(); ++a)
      if (c[a] > 0) lhs += p * c[a] * f(a, c);
  double rhs = 0.0;
  const std::vector<double> lam = intensity(D);
  for (int a = 0; a < D.atoms(); ++a) {
    if (lam[a] <= 0.0) continue;
    const ConfigDistribution q = palm(D, a);
    double e = 0.0;
    for (const auto& [c, p] : q.probs) e += p * f(a, c);
    rhs += lam[a] * e;
  }
  return {lhs, rhs};
}

double d_operator_expectation(const ConfigDistribution& D,
                              const std::function<double(int, const CountConfig&)>& f) {
  const std::vector<double> lam = intensity(D);
  double s = 0.0;
  for (const auto& [c, p] : D.probs) {
    double inner = 0.0;
    CountConfig up = c;
    for (int a = 0; a < D.atoms(); ++a) {
      if (lam[a] > 0.0) {
        up[a] += 1;
        inner += lam[a] * f(a, up);
        up[a] -= 1;
      }
      if (c[a] > 0) inner -= c[a] * f(a, c);
    }
    s += p * inner;
  }
  return s;
}

LocalDependenceReport local_dependence_check(const ConfigDistribution& D,
                                             const std::vector<std::vector<int>>& neighborhoods,
                                             double tol) {
  if (static_cast<int>(neighborhoods.size()) != D.atoms())
    throw DomainError("local_dependence_check: need one neighborhood per atom");
  const std::vector<double> lam = intensity(D);
  LocalDependenceReport rep;
  for (int a = 0; a < D.atoms(); ++a) {
    bool self = false;
    for (int b : neighborhoods[a]) {
      if (b < 0 || b >= D.atoms()) throw DomainError("local_dependence_check: neighborhood atom out of range");
      self |= b == a;
    }
    if (!self) throw DomainError("local_dependence_check: each neighborhood must contain its own atom");
    if (lam[a] <= 0.0) continue;

    std::vector<char> inside(D.atoms(), 0);
    for (int b : neighborhoods[a]) inside[b] = 1;
    const auto restrict_outside = [&](const std::map<CountConfig, double>& probs) {
      std::map<CountConfig, double> out;
      for (const auto& [c, p] : probs) {
        CountConfig r;
        r.reserve(c.size());
        for (int b = 0; b < D.atoms(); ++b)
          if (!inside[b]) r.push_back(c[b]);
        out[r] += p;
      }
      return out;
    };
    const auto ma = restrict_outside(D.probs);
    const auto mp = restrict_outside(palm(D, a).probs);
    double tv = D.truncated_mass;  // palm side carries no truncated mass
    auto ia = ma.begin();
    auto ip = mp.begin();
    while (ia != ma.end() || ip != mp.end()) {
      if (ip == mp.end() || (ia != ma.end() && ia->first < ip->first)) {
        tv += ia->second;
        ++ia;
      } else if (ia == ma.end() || ip->first < ia->first) {
        tv += ip->second;
        ++ip;
      } else {
        tv += std::fabs(ia->second - ip->second);
        ++ia;
        ++ip;
      }
    }
    tv *= 0.5;
    if (tv > rep.max_discrepancy) {
      rep.max_discrepancy = tv;
      rep.worst_atom = a;
    }
  }
  rep.local = rep.max_discrepancy <= tol;
  return rep;
}

PmfTable total_count_pmf(const ConfigDistribution& D) {
  int max_count = 0;
  for (const auto& [c, p] : D.probs) max_count = std::max(max_count, config_total(c));
  PmfTable t;
  t.p.assign(max_count + 1, 0.0);
  for (const auto& [c, p] : D.probs) t.p[config_total(c)] += p;
  t.tail_mass = std::max(0.0, D.truncated_mass);
  return t;
}

double config_tv(const ConfigDistribution& A, const ConfigDistribution& B) {
  require_same_carrier(A, B, "config_tv");
  double s = std::max(0.0, A.truncated_mass) + std::max(0.0, B.truncated_mass);
  auto ia = A.probs.begin();
  auto ib = B.probs.begin();
  while (ia != A.probs.end() || ib != B.probs.end()) {
    if (ib == B.probs.end() || (ia != A.probs.end() && ia->first < ib->first)) {
      s += ia->second;
      ++ia;
    } else if (ia == A.probs.end() || ib->first < ia->first) {
      s += ib->second;
      ++ib;
    } else {
      s += std::fabs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * s;
}

ConfigDistribution truncated_poisson_dist(const CarrierSpace& carrier, const std::vector<double>& means,
                                          const std::vector<int>& caps, double trim_budget,
                                          std::size_t max_support) {
  require_finite_atoms(carrier, "truncated_poisson_dist");
  const int k = carrier.atom_count();
  if (static_cast<int>(means.size()) != k || static_cast<int>(caps.size()) != k)
    throw DomainError("truncated_poisson_dist: need one mean and one cap per atom");
  std::vector<std::vector<double>> pmf(k);
  for (int a = 0; a < k; ++a) {
    if (means[a] < 0.0) throw DomainError("truncated_poisson_dist: negative mean");
    if (caps[a] < 0) throw DomainError("truncated_poisson_dist: negative cap");
    pmf[a].resize(caps[a] + 1);
    double term = std::exp(-means[a]);
    for (int c = 0; c <= caps[a]; ++c) {
      pmf[a][c] = term;
      term *= means[a] / (c + 1);
    }
  }

  ConfigDistribution out;
  out.carrier = carrier;
  // Depth-first product enumeration. Later factors never exceed 1, so a
  // prefix whose product is already below the pruning floor cannot recover.
  const double floor = trim_budget > 0.0 ? trim_budget * 1e-6 : 0.0;
  CountConfig c(k, 0);
  const std::function<void(int, double)> walk = [&](int a, double prefix) {
    if (a == k) {
      out.probs[c] = prefix;
      if (out.probs.size() > max_support) throw ResourceError("truncated_poisson_dist: support cap exceeded");
      return;
    }
    for (int v = 0; v <= caps[a]; ++v) {
      const double p = prefix * pmf[a][v];
      if (floor > 0.0 && p < floor) continue;
      c[a] = v;
      walk(a + 1, p);
    }
    c[a] = 0;
  };
  walk(0, 1.0);
  double kept = 0.0;
  for (const auto& [cc, p] : out.probs) kept += p;
  double pruned_total = 0.0;
  {
    double full = 1.0;
    for (int b = 0; b < k; ++b) {
      double s = 0.0;
      for (double x : pmf[b]) s += x;
      full *= s;
    }
    pruned_total = std::max(0.0, full - kept);
  }
  if (pruned_total > trim_budget + 1e-15)
    throw ResourceError("truncated_poisson_dist: pruning floor dropped more than the trim budget");
  const double remaining_budget = trim_budget - pruned_total;
  greedy_trim(out.probs, remaining_budget);
  double final_kept = 0.0;
  for (const auto& [cc, p] : out.probs) final_kept += p;
  out.truncated_mass = std::max(0.0, 1.0 - final_kept);
  return out;
}

ConfigDistribution bernoulli_process_dist(const CarrierSpace& carrier, const std::vector<double>& p) {
  require_finite_atoms(carrier, "bernoulli_process_dist");
  const int n = carrier.atom_count();
  if (static_cast<int>(p.size()) != n) throw DomainError("bernoulli_process_dist: need one probability per atom");
  if (n > 20) throw ResourceError("bernoulli_process_dist: more than 20 indicators");
  for (double x : p)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("bernoulli_process_dist: probabilities must lie in [0, 1]");
  ConfigDistribution out;
  out.carrier = carrier;
  const std::uint64_t count = 1ull << n;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    CountConfig c(n, 0);
    double prob = 1.0;
    for (int a = 0; a < n; ++a) {
      const bool on = (bits >> a) & 1u;
      c[a] = on ? 1 : 0;
      prob *= on ? p[a] : 1.0 - p[a];
    }
    if (prob > 0.0) out.probs[c] += prob;
  }
  out.truncated_mass = 0.0;
  return out;
}

std::vector<double> discrete_renewal_intensity(const std::vector<double>& first_pmf,
                                               const std::vector<double>& gap_pmf, int T) {
  std::vector<double> u(T + 1, 0.0);  // 1-indexed slots
  auto g = [&](int t) { return t >= 1 && t <= static_cast<int>(first_pmf.size()) ? first_pmf[t - 1] : 0.0; };
  auto f = [&](int t) { return t >= 1 && t <= static_cast<int>(gap_pmf.size()) ? gap_pmf[t - 1] : 0.0; };
  for (int t = 1; t <= T; ++t) {
    u[t] = g(t);
    for (int s = 1; s < t; ++s) u[t] += u[s] * f(t - s);
  }
  return {u.begin() + 1, u.end()};
}

ConfigDistribution discrete_renewal_dist(const std::vector<double>& first_pmf,
                                         const std::vector<double>& gap_pmf, int T) {
  if (T < 1 || T > 20) throw DomainError("discrete_renewal_dist: slots must lie in [1, 20]");
  auto check_pmf = [](const std::vector<double>& v, const char* who) {
    double s = 0.0;
    for (double x : v) {
      if (!(x >= 0.0)) throw DomainError(std::string(who) + ": negative mass");
      s += x;
    }
    if (s > 1.0 + 1e-12) throw DomainError(std::string(who) + ": mass exceeds 1");
  };
  check_pmf(first_pmf, "discrete_renewal_dist: first-arrival pmf");
  check_pmf(gap_pmf, "discrete_renewal_dist: gap pmf");
  auto g = [&](int t) { return t >= 1 && t <= static_cast<int>(first_pmf.size()) ? first_pmf[t - 1] : 0.0; };
  auto f = [&](int t) { return t >= 1 && t <= static_cast<int>(gap_pmf.size()) ? gap_pmf[t - 1] : 0.0; };
  auto g_cdf = [&](int t) {
    double s = 0.0;
    for (int i = 1; i <= t; ++i) s += g(i);
    return s;
  };
  auto f_cdf = [&](int t) {
    double s = 0.0;
    for (int i = 1; i <= t; ++i) s += f(i);
    return s;
  };

  std::vector<double> positions(T);
  for (int t = 1; t <= T; ++t) positions[t - 1] = static_cast<double>(t) / T;
  ConfigDistribution out;
  out.carrier = CarrierSpace::finite_atoms_on_interval(positions);
  const std::uint64_t count = 1ull << T;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    double prob;
    if (bits == 0) {
      prob = std::max(0.0, 1.0 - g_cdf(T));
    } else {
      std::vector<int> slots;
      for (int t = 1; t <= T; ++t)
        if ((bits >> (t - 1)) & 1u) slots.push_back(t);
      prob = g(slots.front());
      for (std::size_t i = 1; i < slots.size() && prob > 0.0; ++i) prob *= f(slots[i] - slots[i - 1]);
      if (prob > 0.0) prob *= std::max(0.0, 1.0 - f_cdf(T - slots.back()));
    }
    if (prob > 0.0) {
      CountConfig c(T, 0);
      for (int t = 1; t <= T; ++t) c[t - 1] = (bits >> (t - 1)) & 1u ? 1 : 0;
      out.probs[c] = prob;
    }
  }
  out.truncated_mass = 0.0;
  return out;
}

ConfigDistribution convolve(const ConfigDistribution& A, const ConfigDistribution& B, double trim_budget,
                            std::size_t max_support) {
  require_same_carrier(A, B, "convolve");
  ConfigDistribution out;
  out.carrier = A.carrier;
  for (const auto& [ca, pa] : A.probs)
    for (const auto& [cb, pb] : B.probs) {
      CountConfig c = ca;
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += cb[i];
      out.probs[c] += pa * pb;
      if (out.probs.size() > max_support) throw ResourceError("convolve: support cap exceeded");
    }
  greedy_trim(out.probs, trim_budget);
  double kept = 0.0;
  for (const auto& [c, p] : out.probs) kept += p;
  out.truncated_mass = std::max(0.0, 1.0 - kept);
  return out;
}

TransportDistance exact_transport_distance(
    const ConfigDistribution& D1, const ConfigDistribution& D2,
    const std::function<double(const CountConfig&, const CountConfig&)>& cost, double cost_cap,
    std::size_t max_pairs) {
  const double t1 = std::max(0.0, D1.truncated_mass);
  const double t2 = std::max(0.0, D2.truncated_mass);
  std::vector<const CountConfig*> s1, s2;
  std::vector<double> supply, demand;
  for (const auto& [c, p] : D1.probs) {
    s1.push_back(&c);
    supply.push_back(p);
  }
  for (const auto& [c, p] : D2.probs) {
    s2.push_back(&c);
    demand.push_back(p);
  }
  const bool v1 = t1 > 1e-15;
  const bool v2 = t2 > 1e-15;
  const std::size_t m = s1.size() + (v1 ? 1 : 0);
  const std::size_t n = s2.size() + (v2 ? 1 : 0);
  if (m * n > max_pairs) throw ResourceError("exact_transport_distance: support product exceeds cap");
  if (v1) supply.push_back(t1);
  if (v2) demand.push_back(t2);

  CostMatrix cm(static_cast<int>(m), static_cast<int>(n));
  for (std::size_t i = 0; i < s1.size(); ++i)
    for (std::size_t j = 0; j < s2.size(); ++j) cm.at(static_cast<int>(i), static_cast<int>(j)) = cost(*s1[i], *s2[j]);
  // Rows/columns for the truncated remainders stay at zero cost: the solver
  // then returns the optimistic value and the uncertainty interval prices the
  // remainder at the cost cap.
  const TransportSolution sol = solve_transport(supply, demand, cm);
  TransportDistance out;
  out.value = sol.cost;
  out.interval = (t1 + t2) * cost_cap;
  return out;
}

double rho1_counts(const CountConfig& a, const CountConfig& b, const CarrierSpace& carrier) {
  const int ta = config_total(a);
  const int tb = config_total(b);
  if (ta != tb) return 1.0;
  if (ta == 0) return 0.0;
  if (a == b) return 0.0;
  CostMatrix cost(ta, ta);
  int r = 0;
  for (int ai = 0; ai < static_cast<int>(a.size()); ++ai)
    for (int k = 0; k < a[ai]; ++k, ++r) {
      int c = 0;
      for (int bj = 0; bj < static_cast<int>(b.size()); ++bj)
        for (int l = 0; l < b[bj]; ++l, ++c) cost.at(r, c) = carrier.atom_distance(ai, bj);
    }
  return assignment_solve(cost).total / ta;
}

double d1_prime_counts(const CountConfig& a, const CountConfig& b, const CarrierSpace& carrier) {
  const CountConfig* big = &a;
  const CountConfig* small = &b;
  if (config_total(a) < config_total(b)) std::swap(big, small);
  const int m = config_total(*big);
  const int n = config_total(*small);
  if (n == 0) return m;
  CostMatrix cost(m, n);
  int r = 0;
  for (int ai = 0; ai < static_cast<int>(big->size()); ++ai)
    for (int k = 0; k < (*big)[ai]; ++k, ++r) {
      int cc = 0;
      for (int bj = 0; bj < static_cast<int>(small->size()); ++bj)
        for (int l = 0; l < (*small)[bj]; ++l, ++cc) cost.at(r, cc) = carrier.atom_distance(ai, bj);
    }
  return assignment_solve(cost).total + (m - n);
}

TransportDistance exact_d2(const ConfigDistribution& D1, const ConfigDistribution& D2,
                           std::size_t max_pairs) {
  require_same_carrier(D1, D2, "exact_d2");
  const CarrierSpace& carrier = D1.carrier;
  return exact_transport_distance(
      D1, D2, [&carrier](const CountConfig& a, const CountConfig& b) { return rho1_counts(a, b, carrier); },
      1.0, max_pairs);
}

std::string serialize(const ConfigDistribution& D) {
  require_finite_atoms(D.carrier, "serialize");
  std::ostringstream os;
  const int k = D.atoms();
  os << "steinpp-config-dist 1\n";
  os << "atoms " << k << "\n";
  os << "metric\n";
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) os << (j ? " " : "") << format_double(D.carrier.atom_distance(i, j));
    os << "\n";
  }
  os << "truncated_mass " << format_double(D.truncated_mass) << "\n";
  os << "configs " << D.probs.size() << "\n";
  for (const auto& [c, p] : D.probs) {
    for (int x : c) os << x << " ";
    os << format_double(p) << "\n";
  }
  return os.str();
}

ConfigDistribution parse_config_distribution(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "steinpp-config-dist" || version != 1)
    throw DomainError("parse_config_distribution: bad header");
  int k = 0;
  if (!(is >> tag >> k) || tag != "atoms" || k < 1) throw DomainError("parse_config_distribution: bad atom count");
  if (!(is >> tag) || tag != "metric") throw DomainError("parse_config_distribution: missing metric");
  std::vector<std::vector<double>> metric(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (!(is >> metric[i][j])) throw DomainError("parse_config_distribution: bad metric entry");
  ConfigDistribution out;
  out.carrier = CarrierSpace::finite_atoms(std::move(metric));
  if (!(is >> tag >> out.truncated_mass) || tag != "truncated_mass")
    throw DomainError("parse_config_distribution: missing truncated mass");
  std::size_t rows = 0;
  if (!(is >> tag >> rows) || tag != "configs") throw DomainError("parse_config_distribution: missing config count");
  for (std::size_t r = 0; r < rows; ++r) {
    CountConfig c(k, 0);
    for (int a = 0; a < k; ++a)
      if (!(is >> c[a])) throw DomainError("parse_config_distribution: bad count");
    double p = 0.0;
    if (!(is >> p)) throw DomainError("parse_config_distribution: bad probability");
    out.probs[c] = p;
  }
  out.validate();
  return out;
}

}  // namespace steinpp
