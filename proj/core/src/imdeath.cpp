#include "steinpp/imdeath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "steinpp/metrics.hpp"

namespace steinpp {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string point_field(const Point& p) {
  if (p.atom >= 0) return std::to_string(p.atom);
  std::string s;
  if (p.label >= 0) s += "L" + std::to_string(p.label) + ":";
  for (std::size_t i = 0; i < p.coord.size(); ++i) {
    if (i) s += ";";
    s += format_double(p.coord[i]);
  }
  return s;
}

}  // namespace

SpatialIntensity SpatialIntensity::discrete(const CarrierSpace& carrier, std::vector<double> masses) {
  if (carrier.kind() != CarrierSpace::Kind::FiniteAtoms)
    throw DomainError("SpatialIntensity: discrete variant needs a finite atom carrier");
  if (static_cast<int>(masses.size()) != carrier.atom_count())
    throw DomainError("SpatialIntensity: need one mass per atom");
  SpatialIntensity out(carrier, true);
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("SpatialIntensity: masses must be finite and >= 0");
    total += m;
  }
  out.masses_ = std::move(masses);
  out.total_ = total;
  return out;
}

SpatialIntensity SpatialIntensity::density(const CarrierSpace& carrier, std::function<double(const Point&)> dens,
                                           double sup_bound, double total_mass) {
  if (carrier.kind() != CarrierSpace::Kind::Interval && carrier.kind() != CarrierSpace::Kind::Cube)
    throw DomainError("SpatialIntensity: density variant needs an interval or cube carrier");
  if (!std::isfinite(sup_bound) || sup_bound <= 0.0)
    throw DomainError("SpatialIntensity: density supremum must be finite and positive");
  if (!(total_mass >= 0.0) || !std::isfinite(total_mass))
    throw DomainError("SpatialIntensity: total mass must be finite and >= 0");
  if (total_mass > sup_bound * (1.0 + 1e-9))
    throw DomainError("SpatialIntensity: total mass exceeds supremum times the unit volume");
  if (!dens) throw DomainError("SpatialIntensity: missing density function");
  SpatialIntensity out(carrier, false);
  out.dens_ = std::move(dens);
  out.bound_ = sup_bound;
  out.total_ = total_mass;
  return out;
}

const std::vector<double>& SpatialIntensity::masses() const {
  if (!discrete_) throw DomainError("SpatialIntensity: masses are only defined for the discrete variant");
  return masses_;
}

double SpatialIntensity::density_at(const Point& x) const {
  if (discrete_) throw DomainError("SpatialIntensity: density is only defined for the density variant");
  const double v = dens_(x);
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("SpatialIntensity: density returned a bad value");
  if (v > bound_ * (1.0 + 1e-12)) throw DomainError("SpatialIntensity: density exceeds its declared supremum");
  return v;
}

Point SpatialIntensity::sample_location(Rng& rng) const {
  if (total_ <= 0.0) throw DomainError("SpatialIntensity: cannot sample a location from a zero measure");
  if (discrete_) {
    const double u = rng.uniform() * total_;
    double acc = 0.0;
    int last = -1;
    for (int a = 0; a < static_cast<int>(masses_.size()); ++a) {
      if (masses_[a] <= 0.0) continue;
      acc += masses_[a];
      last = a;
      if (u < acc) return Point::atom_index(a);
    }
    return Point::atom_index(last);
  }
  const int d = carrier_.dim();
  for (int attempt = 0; attempt < 10'000'000; ++attempt) {
    Point p;
    p.coord.resize(d);
    for (int i = 0; i < d; ++i) p.coord[i] = rng.uniform();
    if (rng.uniform() * bound_ <= density_at(p)) return p;
  }
  throw ResourceError("SpatialIntensity: rejection sampling failed to accept");
}

Configuration sample_poisson_process(const SpatialIntensity& intensity, Rng& rng) {
  Configuration out;
  if (intensity.total() <= 0.0) return out;
  const int n = rng.poisson(intensity.total());
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) out.add(intensity.sample_location(rng));
  return out;
}

Configuration sample_poisson_process(const SpatialIntensity& intensity, std::uint64_t seed) {
  Rng rng(seed);
  return sample_poisson_process(intensity, rng);
}

Configuration SpatialTrajectory::state_at(double t) const {
  std::vector<Point> live = initial.points;
  for (const SpatialEvent& e : events) {
    if (e.time > t) break;
    if (e.birth)
      live.push_back(e.location);
    else
      live.erase(live.begin() + e.death_index);
  }
  Configuration out;
  out.points = std::move(live);
  return out;
}

std::string SpatialTrajectory::to_csv() const {
  std::ostringstream os;
  os << "time,event,location\n";
  for (const SpatialEvent& e : events)
    os << format_double(e.time) << "," << (e.birth ? "birth" : "death") << "," << point_field(e.location) << "\n";
  return os.str();
}

SpatialTrajectory simulate_spatial_imdeath(const Configuration& xi0, const SpatialIntensity& intensity,
                                           double horizon, std::uint64_t seed) {
  if (horizon < 0.0) throw DomainError("simulate_spatial_imdeath: horizon must be >= 0");
  const double lambda = intensity.total();
  // Event times and the birth-or-death choice read the stream the count-level
  // simulator reads, so counts agree path by path for a shared seed; marks
  // (birth locations, which point dies) read a separate derived stream.
  Rng decisions(seed);
  Rng marks(derive_seed(seed, 0x6d61726bull));

  SpatialTrajectory traj;
  traj.initial = xi0;
  traj.horizon = horizon;
  std::vector<Point> live = xi0.points;
  double t = 0.0;
  while (true) {
    const double rate = lambda + static_cast<double>(live.size());
    if (rate <= 0.0) break;
    t += decisions.exponential(rate);
    if (t > horizon) break;
    const double u = decisions.uniform();
    const bool birth = live.empty() || u * rate < lambda;
    SpatialEvent e;
    e.time = t;
    e.birth = birth;
    if (birth) {
      e.location = intensity.sample_location(marks);
      live.push_back(e.location);
    } else {
      e.death_index = static_cast<int>(marks.uniform_index(live.size()));
      e.location = live[e.death_index];
      live.erase(live.begin() + e.death_index);
    }
    traj.events.push_back(std::move(e));
  }
  traj.final_config.points = std::move(live);
  return traj;
}

double AnchorTestFunction::operator()(const Configuration& xi) const { return rho1(xi, anchor, space); }

namespace {

double eval_with_extras(const ConfigFunction& h, const std::vector<Point>& live,
                        std::initializer_list<const Point*> extras) {
  Configuration c;
  c.points = live;
  for (const Point* p : extras) c.points.push_back(*p);
  return h(c);
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

/// Integrates `diff` of the base immigration-death chain started at `xi` over
/// [0, stop], exactly between events; `diff` sees the current live points.
double integrate_along_path(const std::function<double(const std::vector<Point>&)>& diff,
                            const Configuration& xi, const SpatialIntensity& intensity, double stop,
                            Rng& rng) {
  const double lambda = intensity.total();
  std::vector<Point> live = xi.points;
  double t = 0.0;
  double integral = 0.0;
  double current = diff(live);
  while (t < stop) {
    const double rate = lambda + static_cast<double>(live.size());
    const double next = rate > 0.0 ? t + rng.exponential(rate) : stop;
    const double seg_end = std::min(next, stop);
    integral += current * (seg_end - t);
    if (next >= stop) break;
    const double u = rng.uniform();
    if (live.empty() || u * rate < lambda) {
      live.push_back(intensity.sample_location(rng));
    } else {
      live.erase(live.begin() + rng.uniform_index(live.size()));
    }
    t = next;
    current = diff(live);
  }
  return integral;
}

}  // namespace

McEstimate estimate_gh_difference(const ConfigFunction& h, const Configuration& xi, const Point& x,
                                  const SpatialIntensity& intensity, double tstar, int reps,
                                  std::uint64_t seed) {
  if (!(tstar > 0.0)) throw DomainError("estimate_gh_difference: tstar must be positive");
  if (reps < 2) throw DomainError("estimate_gh_difference: need at least 2 replications");
  if (!h) throw DomainError("estimate_gh_difference: missing test function");
  RunningStats stats;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    const double tau = rng.exponential(1.0);
    const double stop = std::min(tau, tstar);
    const auto diff = [&](const std::vector<Point>& live) {
      return eval_with_extras(h, live, {&x}) - eval_with_extras(h, live, {});
    };
    stats.add(-integrate_along_path(diff, xi, intensity, stop, rng));
  }
  McEstimate out;
  out.estimate = stats.mean();
  out.se = stats.se();
  out.truncation_bound = std::exp(-tstar);
  out.reps = reps;
  return out;
}

McEstimate estimate_second_difference(const ConfigFunction& h, const Configuration& xi, const Point& alpha,
                                      const Point& beta, const SpatialIntensity& intensity, double tstar,
                                      int reps, std::uint64_t seed) {
  if (!(tstar > 0.0)) throw DomainError("estimate_second_difference: tstar must be positive");
  if (reps < 2) throw DomainError("estimate_second_difference: need at least 2 replications");
  if (!h) throw DomainError("estimate_second_difference: missing test function");
  RunningStats stats;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    const double tau_a = rng.exponential(1.0);
    const double tau_b = rng.exponential(1.0);
    const double stop = std::min(std::min(tau_a, tau_b), tstar);
    const auto diff = [&](const std::vector<Point>& live) {
      return eval_with_extras(h, live, {&alpha, &beta}) - eval_with_extras(h, live, {&alpha}) -
             eval_with_extras(h, live, {&beta}) + eval_with_extras(h, live, {});
    };
    stats.add(-integrate_along_path(diff, xi, intensity, stop, rng));
  }
  McEstimate out;
  out.estimate = stats.mean();
  out.se = stats.se();
  out.truncation_bound = std::exp(-2.0 * tstar);
  out.reps = reps;
  return out;
}

double stein_factor_bound(double lambda, int xi_size) {
  if (!(lambda > 0.0)) throw DomainError("stein_factor_bound: lambda must be positive");
  if (xi_size < 0) throw DomainError("stein_factor_bound: configuration size must be >= 0");
  return 3.5 / lambda + 2.5 / (xi_size + 1.0);
}

SteinResidualReport stein_equation_residual(const ConfigFunction& h, const Configuration& xi,
                                            const SpatialIntensity& intensity, int reps, std::uint64_t seed,
                                            double tstar, int density_locations) {
  if (!h) throw DomainError("stein_equation_residual: missing test function");
  if (reps < 2) throw DomainError("stein_equation_residual: need at least 2 replications");
  const double lambda = intensity.total();

  SteinResidualReport rep;
  rep.h_value = h(xi);

  RunningStats po_stats;
  {
    Rng po_rng(derive_seed(seed, 1));
    for (int r = 0; r < reps; ++r) po_stats.add(h(sample_poisson_process(intensity, po_rng)));
  }
  rep.poisson_mean = po_stats.mean();

  double gen = 0.0;
  double var = po_stats.se() * po_stats.se();
  double trunc = 0.0;

  if (intensity.is_discrete()) {
    const std::vector<double>& masses = intensity.masses();
    for (int a = 0; a < static_cast<int>(masses.size()); ++a) {
      if (masses[a] <= 0.0) continue;
      const McEstimate est =
          estimate_gh_difference(h, xi, Point::atom_index(a), intensity, tstar, reps,
                                 derive_seed(seed, 100 + static_cast<std::uint64_t>(a)));
      gen += masses[a] * est.estimate;
      var += masses[a] * est.se * masses[a] * est.se;
      trunc += masses[a] * est.truncation_bound;
    }
  } else if (lambda > 0.0) {
    if (density_locations < 2) throw DomainError("stein_equation_residual: need at least 2 density locations");
    Rng loc_rng(derive_seed(seed, 2));
    RunningStats between;
    double within_var = 0.0;
    double trunc_each = 0.0;
    for (int j = 0; j < density_locations; ++j) {
      const Point x = intensity.sample_location(loc_rng);
      const McEstimate est = estimate_gh_difference(h, xi, x, intensity, tstar, reps,
                                                    derive_seed(seed, 300 + static_cast<std::uint64_t>(j)));
      between.add(est.estimate);
      within_var += est.se * est.se;
      trunc_each = est.truncation_bound;
    }
    gen += lambda * between.mean();
    var += lambda * lambda *
           (between.se() * between.se() + within_var / (static_cast<double>(density_locations) * density_locations));
    trunc += lambda * trunc_each;
  }

  for (std::size_t i = 0; i < xi.points.size(); ++i) {
    Configuration minus;
    minus.points = xi.points;
    minus.points.erase(minus.points.begin() + static_cast<std::ptrdiff_t>(i));
    const McEstimate est = estimate_gh_difference(h, minus, xi.points[i], intensity, tstar, reps,
                                                  derive_seed(seed, 200 + static_cast<std::uint64_t>(i)));
    gen -= est.estimate;
    var += est.se * est.se;
    trunc += est.truncation_bound;
  }

  rep.generator = gen;
  rep.residual = gen - (rep.h_value - rep.poisson_mean);
  rep.se = std::sqrt(var);
  rep.truncation_bound = trunc;
  return rep;
}

}  // namespace steinpp
