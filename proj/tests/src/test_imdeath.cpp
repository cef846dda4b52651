#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "steinpp/imdeath.hpp"
#include "steinpp/rng.hpp"
#include "steinpp/univariate.hpp"

using namespace steinpp;

namespace {

Configuration atom_points(int atom, int copies) {
  Configuration c;
  for (int k = 0; k < copies; ++k) c.add(Point::atom_index(atom));
  return c;
}

}  // namespace

TEST_CASE("intensity measures validate their inputs") {
  CHECK_THROWS_AS(SpatialIntensity::discrete(CarrierSpace::interval(), {1.0}), DomainError);
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.2, 0.8});
  CHECK_THROWS_AS(SpatialIntensity::discrete(atoms, {1.0}), DomainError);
  CHECK_THROWS_AS(SpatialIntensity::discrete(atoms, {1.0, -0.5}), DomainError);

  const SpatialIntensity disc = SpatialIntensity::discrete(atoms, {1.0, 2.0});
  CHECK(disc.total() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(disc.density_at(Point::at(0.5)), DomainError);

  CHECK_THROWS_AS(
      SpatialIntensity::density(atoms, [](const Point&) { return 1.0; }, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(
      SpatialIntensity::density(
          CarrierSpace::interval(), [](const Point& x) { return 2.0 * x.coord[0]; }, 0.5, 1.0),
      DomainError);  // total mass cannot exceed the supremum times the volume

  const SpatialIntensity dens = SpatialIntensity::density(
      CarrierSpace::interval(), [](const Point& x) { return 2.0 * x.coord[0]; }, 2.0, 1.0);
  CHECK_THROWS_AS(dens.masses(), DomainError);
  CHECK(dens.density_at(Point::at(0.25)) == doctest::Approx(0.5).epsilon(1e-15));

  // Declared supremum too small for the actual density: detected at evaluation.
  const SpatialIntensity lying = SpatialIntensity::density(
      CarrierSpace::interval(), [](const Point& x) { return 2.0 * x.coord[0]; }, 1.5, 1.0);
  CHECK_THROWS_AS(lying.density_at(Point::at(0.9)), DomainError);

  const SpatialIntensity empty = SpatialIntensity::discrete(atoms, {0.0, 0.0});
  Rng rng(1);
  CHECK_THROWS_AS(empty.sample_location(rng), DomainError);
}

TEST_CASE("discrete location sampling matches the masses") {
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.1, 0.5, 0.9});
  const SpatialIntensity mu = SpatialIntensity::discrete(atoms, {1.0, 2.0, 1.0});
  const int n = 20000;
  std::vector<int> freq(3, 0);
  Rng rng(901);
  for (int k = 0; k < n; ++k) {
    const Point p = mu.sample_location(rng);
    REQUIRE(p.atom >= 0);
    REQUIRE(p.atom < 3);
    ++freq[p.atom];
  }
  const std::vector<double> expect = {0.25, 0.5, 0.25};
  for (int a = 0; a < 3; ++a) {
    const double got = static_cast<double>(freq[a]) / n;
    const double se = std::sqrt(expect[a] * (1.0 - expect[a]) / n);
    CHECK(std::fabs(got - expect[a]) <= 3.0 * se);
  }
}

TEST_CASE("density location sampling matches its law") {
  const SpatialIntensity mu = SpatialIntensity::density(
      CarrierSpace::interval(), [](const Point& x) { return 2.0 * x.coord[0]; }, 2.0, 1.0);
  const int n = 20000;
  double sum = 0.0;
  Rng rng(902);
  for (int k = 0; k < n; ++k) sum += mu.sample_location(rng).coord[0];
  const double mean = sum / n;
  const double sd = std::sqrt(1.0 / 18.0);  // variance of the density 2x on [0, 1]
  CHECK(std::fabs(mean - 2.0 / 3.0) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("poisson process sampling") {
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.25, 0.75});
  const SpatialIntensity zero = SpatialIntensity::discrete(atoms, {0.0, 0.0});
  CHECK(sample_poisson_process(zero, 903).points.empty());

  const SpatialIntensity mu = SpatialIntensity::discrete(atoms, {1.5, 1.0});
  const int n = 20000;
  double total = 0.0;
  double at0 = 0.0;
  int empties = 0;
  for (int k = 0; k < n; ++k) {
    const Configuration c = sample_poisson_process(mu, derive_seed(904, k));
    total += c.size();
    if (c.empty()) ++empties;
    for (const Point& p : c.points)
      if (p.atom == 0) at0 += 1.0;
  }
  const double lambda = 2.5;
  CHECK(std::fabs(total / n - lambda) <= 3.0 * std::sqrt(lambda / n));
  CHECK(std::fabs(at0 / n - 1.5) <= 3.0 * std::sqrt(1.5 / n));
  const double p_empty = std::exp(-lambda);
  CHECK(std::fabs(static_cast<double>(empties) / n - p_empty) <=
        3.0 * std::sqrt(p_empty * (1.0 - p_empty) / n));
}

TEST_CASE("count marginal of the spatial simulator matches the count chain") {
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.3, 0.7});
  const SpatialIntensity mu = SpatialIntensity::discrete(atoms, {1.2, 0.5});
  const double horizon = 6.0;
  const int w0 = 3;
  const Configuration xi0 = atom_points(0, w0);
  for (int s = 0; s < 25; ++s) {
    const std::uint64_t seed = derive_seed(7001, s);
    const SpatialTrajectory spatial = simulate_spatial_imdeath(xi0, mu, horizon, seed);
    const CountTrajectory counts = simulate_count_imdeath(w0, mu.total(), horizon, seed);
    REQUIRE(spatial.events.size() == counts.events.size());
    for (std::size_t k = 0; k < counts.events.size(); ++k) {
      CHECK(spatial.events[k].time == counts.events[k].first);
      CHECK((spatial.events[k].birth ? 1 : -1) == counts.events[k].second);
    }
    CHECK(spatial.final_config.size() == counts.final_count);
    const double mid = horizon / 2.0;
    CHECK(spatial.state_at(mid).size() == counts.count_at(mid));
    CHECK(spatial.state_at(horizon).same_multiset(spatial.final_config));
    CHECK(spatial.state_at(0.0).same_multiset(xi0));
  }
}

TEST_CASE("trajectory bookkeeping") {
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.5});
  const SpatialIntensity zero = SpatialIntensity::discrete(atoms, {0.0});
  const SpatialTrajectory still = simulate_spatial_imdeath(Configuration{}, zero, 10.0, 905);
  CHECK(still.events.empty());
  CHECK(still.final_config.empty());
  CHECK_THROWS_AS(simulate_spatial_imdeath(Configuration{}, zero, -1.0, 905), DomainError);

  const SpatialIntensity mu = SpatialIntensity::discrete(atoms, {2.0});
  const SpatialTrajectory traj = simulate_spatial_imdeath(atom_points(0, 2), mu, 4.0, 906);
  const std::string csv = traj.to_csv();
  CHECK(csv.rfind("time,event,location\n", 0) == 0);
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == traj.events.size() + 1);
  double prev = 0.0;
  int count = 2;
  for (const SpatialEvent& e : traj.events) {
    CHECK(e.time > prev);
    prev = e.time;
    count += e.birth ? 1 : -1;
    CHECK(count >= 0);
  }
  CHECK(count == traj.final_config.size());
}

TEST_CASE("anchor test function is the normalized matching distance") {
  const CarrierSpace space = CarrierSpace::interval();
  Configuration anchor;
  anchor.add(Point::at(0.25));
  anchor.add(Point::at(0.75));
  const AnchorTestFunction h(space, anchor);
  CHECK(h(anchor) == 0.0);
  Configuration near = anchor;
  near.points[1] = Point::at(0.80);
  CHECK(h(near) == doctest::Approx(0.025).epsilon(1e-14));
  Configuration smaller;
  smaller.add(Point::at(0.25));
  CHECK(h(smaller) == 1.0);
  CHECK(h(Configuration{}) == 1.0);
}

TEST_CASE("constant test functions have zero differences") {
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.5});
  const SpatialIntensity mu = SpatialIntensity::discrete(atoms, {1.0});
  const ConfigFunction h = [](const Configuration&) { return 0.7; };
  const McEstimate first = estimate_gh_difference(h, Configuration{}, Point::atom_index(0), mu, 8.0, 50, 907);
  CHECK(first.estimate == 0.0);
  CHECK(first.se == 0.0);
  CHECK(first.truncation_bound == doctest::Approx(std::exp(-8.0)).epsilon(1e-14));
  const McEstimate second = estimate_second_difference(h, Configuration{}, Point::atom_index(0),
                                                       Point::atom_index(0), mu, 8.0, 50, 908);
  CHECK(second.estimate == 0.0);
  CHECK(second.truncation_bound == doctest::Approx(std::exp(-16.0)).epsilon(1e-14));
  CHECK_THROWS_AS(estimate_gh_difference(h, Configuration{}, Point::atom_index(0), mu, 8.0, 1, 907),
                  DomainError);
  CHECK_THROWS_AS(estimate_gh_difference(h, Configuration{}, Point::atom_index(0), mu, 0.0, 50, 907),
                  DomainError);
}

TEST_CASE("zero immigration gives the explicit one-point difference") {
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.5});
  const SpatialIntensity zero = SpatialIntensity::discrete(atoms, {0.0});
  // h(xi) = 1 unless xi is empty; the lone extra point dies at rate one, so the
  // difference of the two coupled paths integrates the lifetime indicator.
  const AnchorTestFunction h(atoms, Configuration{});
  const double tstar = 5.0;
  const McEstimate est =
      estimate_gh_difference(h, Configuration{}, Point::atom_index(0), zero, tstar, 20000, 909);
  const double expect = -(1.0 - std::exp(-tstar));
  CHECK(est.truncation_bound == doctest::Approx(std::exp(-tstar)).epsilon(1e-14));
  CHECK(est.se > 0.0);
  CHECK(std::fabs(est.estimate - expect) <= 4.0 * est.se + est.truncation_bound);
}

TEST_CASE("single-atom differences match the count-chain solution") {
  const double lambda = 1.4;
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.5});
  const SpatialIntensity mu = SpatialIntensity::discrete(atoms, {lambda});
  // h(xi) depends on the total count only: 1 unless |xi| = 2.
  const AnchorTestFunction h(atoms, atom_points(0, 2));
  const int window = 12;
  const std::uint64_t all = (1ull << window) - 1ull;
  const SteinSolutionTable sol = stein_solution_recursive(
      CountSet::from_bits(all & ~(1ull << 2), window, true), lambda, window);
  for (int w = 1; w <= 3; ++w) {
    const McEstimate est = estimate_gh_difference(h, atom_points(0, w - 1), Point::atom_index(0), mu,
                                                  30.0, 30000, derive_seed(910, w));
    CHECK(std::fabs(est.estimate - sol.f[w]) <= 4.0 * est.se + est.truncation_bound);
  }
  // Second difference against the same table: consecutive first differences.
  const McEstimate second =
      estimate_second_difference(h, atom_points(0, 1), Point::atom_index(0), Point::atom_index(0), mu, 15.0,
                                 30000, 911);
  const double expect = sol.f[3] - sol.f[2];
  CHECK(std::fabs(second.estimate - expect) <= 4.0 * second.se + second.truncation_bound);
  CHECK(std::fabs(second.estimate) <= stein_factor_bound(lambda, 1) + 4.0 * second.se);
}

TEST_CASE("uniform second-difference bound") {
  CHECK(stein_factor_bound(2.0, 3) == doctest::Approx(2.375).epsilon(1e-15));
  CHECK(stein_factor_bound(0.5, 0) == doctest::Approx(9.5).epsilon(1e-15));
  CHECK_THROWS_AS(stein_factor_bound(0.0, 1), DomainError);
  CHECK_THROWS_AS(stein_factor_bound(1.0, -1), DomainError);
}

TEST_CASE("stein equation residual vanishes for a discrete intensity") {
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.3, 0.8});
  const SpatialIntensity mu = SpatialIntensity::discrete(atoms, {0.8, 0.6});
  Configuration xi;
  xi.add(Point::atom_index(0));
  xi.add(Point::atom_index(1));
  Configuration anchor;
  anchor.add(Point::atom_index(0));
  const AnchorTestFunction h(atoms, anchor);
  const SteinResidualReport rep = stein_equation_residual(h, xi, mu, 4000, 912);
  CHECK(rep.se > 0.0);
  CHECK(std::fabs(rep.residual) <= 4.0 * rep.se + rep.truncation_bound + 0.01);
}

TEST_CASE("stein equation residual vanishes for a density intensity") {
  const SpatialIntensity mu = SpatialIntensity::density(
      CarrierSpace::interval(), [](const Point& x) { return 1.5 - x.coord[0]; }, 1.5, 1.0);
  Configuration xi;
  xi.add(Point::at(0.3));
  Configuration anchor;
  anchor.add(Point::at(0.6));
  const AnchorTestFunction h(CarrierSpace::interval(), anchor);
  const SteinResidualReport rep = stein_equation_residual(h, xi, mu, 2000, 913, 30.0, 24);
  CHECK(std::fabs(rep.residual) <= 4.0 * rep.se + rep.truncation_bound + 0.02);
}
