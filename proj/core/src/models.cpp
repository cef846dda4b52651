#include "steinpp/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace steinpp {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double euclid(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coord.size(); ++i) {
    const double d = a.coord[i] - b.coord[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Point uniform_cube_point(int d, Rng& rng) {
  Point p;
  p.coord.resize(d);
  for (int i = 0; i < d; ++i) p.coord[i] = rng.uniform();
  return p;
}

/// Composite Simpson rule on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (b <= a) return 0.0;
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

void MaternSpec::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("MaternSpec: parent mean must be finite and >= 0");
  if (!(r > 0.0)) throw DomainError("MaternSpec: hard-core radius must be positive");
  if (d != 1 && d != 2) throw DomainError("MaternSpec: only dimensions 1 and 2 are supported");
}

std::pair<Configuration, Configuration> sample_matern(const MaternSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  Configuration parent;
  if (spec.mu > 0.0) {
    const int n = rng.poisson(spec.mu);
    parent.points.reserve(n);
    for (int i = 0; i < n; ++i) parent.add(uniform_cube_point(spec.d, rng));
  }
  Configuration thinned;
  for (std::size_t i = 0; i < parent.points.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < parent.points.size() && keep; ++j)
      if (j != i && euclid(parent.points[i], parent.points[j]) <= spec.r) keep = false;
    if (keep) thinned.add(parent.points[i]);
  }
  return {parent, thinned};
}

double ball_cube_intersection_volume(double r, const Point& x, int d) {
  if (!(r > 0.0)) throw DomainError("ball_cube_intersection_volume: radius must be positive");
  if (static_cast<int>(x.coord.size()) != d)
    throw DomainError("ball_cube_intersection_volume: point dimension mismatch");
  if (d == 1) {
    const double x0 = x.coord[0];
    return std::max(0.0, std::min(x0 + r, 1.0) - std::max(x0 - r, 0.0));
  }
  if (d == 2) {
    const double x0 = x.coord[0];
    const double y0 = x.coord[1];
    const auto chord = [&](double t) {
      const double dt = t - x0;
      const double c2 = r * r - dt * dt;
      if (c2 <= 0.0) return 0.0;
      const double c = std::sqrt(c2);
      return std::max(0.0, std::min(y0 + c, 1.0) - std::max(y0 - c, 0.0));
    };
    return simpson(chord, std::max(x0 - r, 0.0), std::min(x0 + r, 1.0), 4096);
  }
  throw DomainError("ball_cube_intersection_volume: only dimensions 1 and 2 are supported");
}

double matern_intensity_density(const MaternSpec& spec, const Point& x) {
  spec.validate();
  for (double c : x.coord)
    if (c < 0.0 || c > 1.0) throw DomainError("matern_intensity_density: point outside the domain");
  return spec.nu() * std::exp(-spec.nu() * ball_cube_intersection_volume(spec.r, x, spec.d));
}

double matern_total_intensity(const MaternSpec& spec) {
  spec.validate();
  if (spec.d == 1) {
    return simpson(
        [&](double t) {
          Point p = Point::at(t);
          return matern_intensity_density(spec, p);
        },
        0.0, 1.0, 4096);
  }
  return simpson(
      [&](double u) {
        return simpson(
            [&](double v) {
              Point p = Point::at(u, v);
              return matern_intensity_density(spec, p);
            },
            0.0, 1.0, 256);
      },
      0.0, 1.0, 256);
}

Configuration sample_matern_reduced_palm(const MaternSpec& spec, const Point& alpha, std::uint64_t seed) {
  spec.validate();
  if (static_cast<int>(alpha.coord.size()) != spec.d)
    throw DomainError("sample_matern_reduced_palm: anchor dimension mismatch");
  Rng rng(seed);
  // The parent conditioned on the anchor's retention is the parent restricted
  // outside the deletion ball, realized by dropping the in-ball points of an
  // unconditioned parent sample.
  std::vector<Point> parent;
  if (spec.mu > 0.0) {
    const int n = rng.poisson(spec.mu);
    parent.reserve(n);
    for (int i = 0; i < n; ++i) {
      Point p = uniform_cube_point(spec.d, rng);
      if (euclid(p, alpha) > spec.r) parent.push_back(std::move(p));
    }
  }
  Configuration out;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < parent.size() && keep; ++j)
      if (j != i && euclid(parent[i], parent[j]) <= spec.r) keep = false;
    if (keep) out.add(parent[i]);
  }
  return out;
}

MarkedBernoulliSpec MarkedBernoulliSpec::independent(std::vector<double> p, Marks marks) {
  MarkedBernoulliSpec out;
  out.law_ = Law::Independent;
  out.n_ = static_cast<int>(p.size());
  out.marks_ = marks;
  for (double x : p)
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("MarkedBernoulliSpec: probabilities must lie in [0, 1]");
  out.p_ = std::move(p);
  out.neighborhoods_.resize(out.n_);
  for (int i = 0; i < out.n_; ++i) out.neighborhoods_[i] = {i};
  return out;
}

MarkedBernoulliSpec MarkedBernoulliSpec::table(std::vector<double> joint,
                                               std::vector<std::vector<int>> neighborhoods, Marks marks) {
  MarkedBernoulliSpec out;
  out.law_ = Law::Table;
  out.marks_ = marks;
  int n = 0;
  while ((1ull << n) < joint.size()) ++n;
  if (joint.size() != (1ull << n) || joint.empty())
    throw DomainError("MarkedBernoulliSpec: table size must be a power of two");
  if (n > 20) throw ResourceError("MarkedBernoulliSpec: more than 20 indicators");
  out.n_ = n;
  double total = 0.0;
  for (double x : joint) {
    if (!(x >= 0.0)) throw DomainError("MarkedBernoulliSpec: negative table entry");
    total += x;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw DomainError("MarkedBernoulliSpec: table does not sum to 1");
  if (static_cast<int>(neighborhoods.size()) != n)
    throw DomainError("MarkedBernoulliSpec: need one neighborhood per indicator");
  for (int i = 0; i < n; ++i) {
    bool self = false;
    for (int j : neighborhoods[i]) {
      if (j < 0 || j >= n) throw DomainError("MarkedBernoulliSpec: neighborhood index out of range");
      self |= j == i;
    }
    if (!self) throw DomainError("MarkedBernoulliSpec: each neighborhood must contain its own indicator");
  }
  out.joint_ = std::move(joint);
  out.neighborhoods_ = std::move(neighborhoods);
  out.p_.assign(n, 0.0);
  for (std::size_t idx = 0; idx < out.joint_.size(); ++idx)
    for (int i = 0; i < n; ++i)
      if ((idx >> i) & 1u) out.p_[i] += out.joint_[idx];
  return out;
}

MarkedBernoulliSpec MarkedBernoulliSpec::m_dependent(std::vector<double> p, int m, Marks marks) {
  if (m < 0) throw DomainError("MarkedBernoulliSpec: window must be >= 0");
  MarkedBernoulliSpec out;
  out.law_ = Law::MDependent;
  out.marks_ = marks;
  out.n_ = static_cast<int>(p.size());
  out.m_ = m;
  out.q_.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw DomainError("MarkedBernoulliSpec: probabilities must lie in [0, 1]");
    out.q_[i] = std::pow(p[i], 1.0 / (m + 1.0));
  }
  out.p_ = std::move(p);
  out.neighborhoods_.resize(out.n_);
  for (int i = 0; i < out.n_; ++i)
    for (int j = std::max(0, i - m); j <= std::min(out.n_ - 1, i + m); ++j) out.neighborhoods_[i].push_back(j);
  return out;
}

bool MarkedBernoulliSpec::has_joint_table() const { return law_ != Law::MDependent; }

std::vector<double> MarkedBernoulliSpec::joint_table() const {
  if (law_ == Law::Table) return joint_;
  if (law_ == Law::MDependent)
    throw DomainError("MarkedBernoulliSpec: no explicit joint table for the latent-window variant");
  if (n_ > 20) throw ResourceError("MarkedBernoulliSpec: more than 20 indicators");
  std::vector<double> out(1ull << n_, 1.0);
  for (std::size_t idx = 0; idx < out.size(); ++idx)
    for (int i = 0; i < n_; ++i) out[idx] *= ((idx >> i) & 1u) ? p_[i] : 1.0 - p_[i];
  return out;
}

std::vector<char> MarkedBernoulliSpec::sample_indicators(Rng& rng) const {
  std::vector<char> out(n_, 0);
  switch (law_) {
    case Law::Independent:
      for (int i = 0; i < n_; ++i) out[i] = rng.bernoulli(p_[i]) ? 1 : 0;
      break;
    case Law::Table: {
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = joint_.size() - 1;
      for (std::size_t idx = 0; idx < joint_.size(); ++idx) {
        acc += joint_[idx];
        if (u < acc) {
          pick = idx;
          break;
        }
      }
      for (int i = 0; i < n_; ++i) out[i] = (pick >> i) & 1u ? 1 : 0;
      break;
    }
    case Law::MDependent: {
      std::vector<double> latent(n_ + m_);
      for (double& y : latent) y = rng.uniform();
      for (int i = 0; i < n_; ++i) {
        bool all = true;
        for (int j = i; j <= i + m_; ++j) all &= latent[j] <= q_[i];
        out[i] = all ? 1 : 0;
      }
      break;
    }
  }
  return out;
}

Point MarkedBernoulliSpec::mark_location(int i, Rng& rng) const {
  if (i < 0 || i >= n_) throw DomainError("MarkedBernoulliSpec: indicator index out of range");
  if (marks_ == Marks::FixedGrid) return Point::at(static_cast<double>(i + 1) / n_);
  return Point::at(rng.uniform());
}

MarkedBernoulliSample sample_marked_bernoulli(const MarkedBernoulliSpec& spec, std::uint64_t seed) {
  Rng indicator_rng(seed);
  Rng mark_rng(derive_seed(seed, 0x6d61726bull));
  MarkedBernoulliSample out;
  out.indicators = spec.sample_indicators(indicator_rng);
  out.marks.reserve(spec.n());
  for (int i = 0; i < spec.n(); ++i) out.marks.push_back(spec.mark_location(i, mark_rng));
  for (int i = 0; i < spec.n(); ++i) {
    if (!out.indicators[i]) continue;
    out.base.add(out.marks[i]);
    Point lifted = out.marks[i];
    lifted.label = i;
    out.lifted.add(lifted);
  }
  return out;
}

ArrivalDist ArrivalDist::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("ArrivalDist: rate must be finite and positive");
  ArrivalDist out;
  out.discrete_ = false;
  out.rate_ = rate;
  return out;
}

ArrivalDist ArrivalDist::discrete_slots(std::vector<double> pmf) {
  double total = 0.0;
  for (double x : pmf) {
    if (!(x >= 0.0)) throw DomainError("ArrivalDist: negative slot mass");
    total += x;
  }
  if (total > 1.0 + 1e-12) throw DomainError("ArrivalDist: slot masses exceed 1");
  ArrivalDist out;
  out.discrete_ = true;
  out.pmf_ = std::move(pmf);
  return out;
}

double ArrivalDist::sample(Rng& rng) const {
  if (!discrete_) return rng.exponential(rate_);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    acc += pmf_[k];
    if (u < acc) return static_cast<double>(k + 1);
  }
  return std::numeric_limits<double>::infinity();
}

double ArrivalDist::cdf(double t) const {
  if (!discrete_) return t <= 0.0 ? 0.0 : -std::expm1(-rate_ * t);
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k)
    if (static_cast<double>(k + 1) <= t + 1e-12) acc += pmf_[k];
  return std::min(acc, 1.0);
}

const std::vector<double>& ArrivalDist::slot_pmf() const {
  if (!discrete_) throw DomainError("ArrivalDist: no slot masses for the exponential variant");
  return pmf_;
}

void RenewalSpec::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("RenewalSpec: horizon must be finite and positive");
}

Configuration sample_renewal(const RenewalSpec& spec, Rng& rng) {
  spec.validate();
  Configuration out;
  double s = spec.first.sample(rng);
  std::size_t guard = 0;
  while (s <= spec.horizon) {
    out.add(Point::at(s / spec.horizon));
    if (++guard > 1'000'000) throw ResourceError("sample_renewal: arrival count guard tripped (gap mass at 0?)");
    s += spec.gap.sample(rng);
  }
  return out;
}

Configuration sample_renewal(const RenewalSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return sample_renewal(spec, rng);
}

Configuration sample_superposition(const std::vector<RenewalSpec>& specs, const std::vector<int>& groups,
                                   std::uint64_t seed) {
  if (specs.empty()) throw DomainError("sample_superposition: need at least one component");
  if (groups.size() != specs.size()) throw DomainError("sample_superposition: need one group id per component");
  for (const RenewalSpec& s : specs) {
    s.validate();
    if (s.horizon != specs.front().horizon)
      throw DomainError("sample_superposition: all components must share one horizon");
  }
  std::map<int, Rng> streams;
  Configuration out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto it = streams.find(groups[i]);
    if (it == streams.end())
      it = streams.emplace(groups[i], Rng(derive_seed(seed, static_cast<std::uint64_t>(groups[i])))).first;
    const Configuration c = sample_renewal(specs[i], it->second);
    for (const Point& p : c.points) out.add(p);
  }
  return out;
}

std::string configuration_csv(const Configuration& config) {
  std::size_t dims = 1;
  for (const Point& p : config.points) dims = std::max(dims, p.coord.size());
  std::ostringstream os;
  os << "label";
  if (dims <= 1)
    os << ",x";
  else
    for (std::size_t i = 0; i < dims; ++i) os << ",x" << i;
  os << "\n";
  for (const Point& p : config.points) {
    if (p.label >= 0) os << p.label;
    for (std::size_t i = 0; i < dims; ++i) {
      os << ",";
      if (p.atom >= 0) {
        if (i == 0) os << p.atom;
      } else if (i < p.coord.size()) {
        os << format_double(p.coord[i]);
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace steinpp
