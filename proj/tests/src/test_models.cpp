#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "steinpp/models.hpp"
#include "steinpp/rng.hpp"

using namespace steinpp;

namespace {

double euclid(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coord.size(); ++i) {
    const double d = a.coord[i] - b.coord[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("hard-core spec validation") {
  CHECK_THROWS_AS((MaternSpec{-1.0, 0.1, 1}.validate()), DomainError);
  CHECK_THROWS_AS((MaternSpec{5.0, 0.0, 1}.validate()), DomainError);
  CHECK_THROWS_AS((MaternSpec{5.0, 0.1, 3}.validate()), DomainError);
  MaternSpec{5.0, 0.1, 2}.validate();
}

TEST_CASE("hard-core sampling structure") {
  const MaternSpec empty{0.0, 0.05, 1};
  const auto [p0, t0] = sample_matern(empty, 42);
  CHECK(p0.empty());
  CHECK(t0.empty());

  const MaternSpec spec{25.0, 0.04, 1};
  for (int s = 0; s < 20; ++s) {
    const auto [parent, thinned] = sample_matern(spec, derive_seed(1001, s));
    CHECK(thinned.size() <= parent.size());
    for (const Point& q : thinned.points) {
      bool found = false;
      for (const Point& pp : parent.points)
        if (pp.coord == q.coord) found = true;
      CHECK(found);
    }
    for (std::size_t i = 0; i < thinned.points.size(); ++i)
      for (std::size_t j = i + 1; j < thinned.points.size(); ++j)
        CHECK(euclid(thinned.points[i], thinned.points[j]) > spec.r);
    // A parent point with a neighbor within r must be gone from the thinned layer.
    for (std::size_t i = 0; i < parent.points.size(); ++i) {
      bool crowded = false;
      for (std::size_t j = 0; j < parent.points.size(); ++j)
        if (j != i && euclid(parent.points[i], parent.points[j]) <= spec.r) crowded = true;
      bool kept = false;
      for (const Point& q : thinned.points)
        if (q.coord == parent.points[i].coord) kept = true;
      CHECK(kept == !crowded);
    }
  }
}

TEST_CASE("ball volume inside the unit cube") {
  CHECK(ball_cube_intersection_volume(0.03, Point::at(0.5), 1) == doctest::Approx(0.06).epsilon(1e-14));
  CHECK(ball_cube_intersection_volume(0.03, Point::at(0.01), 1) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(ball_cube_intersection_volume(0.2, Point::at(0.9), 1) == doctest::Approx(0.3).epsilon(1e-14));
  const double pi = 3.14159265358979323846;
  CHECK(ball_cube_intersection_volume(0.05, Point::at(0.5, 0.5), 2) ==
        doctest::Approx(pi * 0.0025).epsilon(1e-6));
  CHECK(ball_cube_intersection_volume(0.05, Point::at(0.0, 0.0), 2) ==
        doctest::Approx(pi * 0.0025 / 4.0).epsilon(1e-6));
  CHECK_THROWS_AS(ball_cube_intersection_volume(0.0, Point::at(0.5), 1), DomainError);
  CHECK_THROWS_AS(ball_cube_intersection_volume(0.1, Point::at(0.5), 2), DomainError);
}

TEST_CASE("thinned intensity density") {
  const MaternSpec spec{10.0, 0.03, 1};
  CHECK(matern_intensity_density(spec, Point::at(0.5)) ==
        doctest::Approx(10.0 * std::exp(-10.0 * 0.06)).epsilon(1e-12));
  CHECK(matern_intensity_density(spec, Point::at(0.0)) ==
        doctest::Approx(10.0 * std::exp(-10.0 * 0.03)).epsilon(1e-12));
  const MaternSpec blanket{100.0, 1.5, 1};
  CHECK(matern_intensity_density(blanket, Point::at(0.5)) < 1e-40);
  CHECK_THROWS_AS(matern_intensity_density(spec, Point::at(1.5)), DomainError);
}

TEST_CASE("total thinned intensity matches simulation") {
  const MaternSpec spec{30.0, 0.04, 1};
  const double predicted = matern_total_intensity(spec);
  const int reps = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < reps; ++s) {
    const auto [parent, thinned] = sample_matern(spec, derive_seed(1002, s));
    sum += thinned.size();
    sum_sq += static_cast<double>(thinned.size()) * thinned.size();
  }
  const double mean = sum / reps;
  const double var = (sum_sq - sum * sum / reps) / (reps - 1);
  CHECK(std::fabs(mean - predicted) <= 3.0 * std::sqrt(var / reps));
}

TEST_CASE("conditioned thinned sample avoids the anchor ball") {
  const MaternSpec spec{25.0, 0.06, 1};
  const Point alpha = Point::at(0.4);
  for (int s = 0; s < 30; ++s) {
    const Configuration c = sample_matern_reduced_palm(spec, alpha, derive_seed(1003, s));
    for (const Point& q : c.points) CHECK(euclid(q, alpha) > spec.r);
  }
  const Configuration a = sample_matern_reduced_palm(spec, alpha, 77);
  const Configuration b = sample_matern_reduced_palm(spec, alpha, 77);
  CHECK(a.same_multiset(b));
  CHECK_THROWS_AS(sample_matern_reduced_palm(spec, Point::at(0.4, 0.4), 1), DomainError);
}

TEST_CASE("independent marked indicators") {
  const std::vector<double> p = {0.2, 0.5, 0.7};
  const MarkedBernoulliSpec spec =
      MarkedBernoulliSpec::independent(p, MarkedBernoulliSpec::Marks::FixedGrid);
  CHECK(spec.n() == 3);
  CHECK(spec.has_joint_table());
  const std::vector<double> joint = spec.joint_table();
  REQUIRE(joint.size() == 8);
  for (int mask = 0; mask < 8; ++mask) {
    double expect = 1.0;
    for (int i = 0; i < 3; ++i) expect *= (mask >> i) & 1 ? p[i] : 1.0 - p[i];
    CHECK(joint[mask] == doctest::Approx(expect).epsilon(1e-14));
  }
  for (int i = 0; i < 3; ++i) {
    REQUIRE(spec.neighborhoods()[i].size() == 1);
    CHECK(spec.neighborhoods()[i][0] == i);
  }

  Rng rng(1004);
  for (int i = 0; i < 3; ++i) {
    const Point m = spec.mark_location(i, rng);
    CHECK(m.coord[0] == doctest::Approx((i + 1) / 3.0).epsilon(1e-15));
  }
  const MarkedBernoulliSpec uspec =
      MarkedBernoulliSpec::independent(p, MarkedBernoulliSpec::Marks::Uniform);
  for (int k = 0; k < 100; ++k) {
    const Point m = uspec.mark_location(k % 3, rng);
    CHECK(m.coord[0] >= 0.0);
    CHECK(m.coord[0] <= 1.0);
  }
  CHECK_THROWS_AS(spec.mark_location(3, rng), DomainError);
  CHECK_THROWS_AS(MarkedBernoulliSpec::independent({1.5}, MarkedBernoulliSpec::Marks::Uniform),
                  DomainError);
}

TEST_CASE("joint-table indicators") {
  using Marks = MarkedBernoulliSpec::Marks;
  const std::vector<std::vector<int>> full = {{0, 1}, {0, 1}};
  CHECK_THROWS_AS(MarkedBernoulliSpec::table({0.5, 0.5, 0.5}, {{0}, {1}, {2}}, Marks::FixedGrid),
                  DomainError);  // size must be a power of two
  CHECK_THROWS_AS(MarkedBernoulliSpec::table({0.3, 0.3, 0.3, 0.2}, full, Marks::FixedGrid), DomainError);
  CHECK_THROWS_AS(MarkedBernoulliSpec::table({0.1, 0.2, 0.3, 0.4}, {{1}, {0}}, Marks::FixedGrid),
                  DomainError);  // neighborhoods must contain their own indicator

  const std::vector<double> joint = {0.1, 0.2, 0.3, 0.4};
  const MarkedBernoulliSpec spec = MarkedBernoulliSpec::table(joint, full, Marks::FixedGrid);
  CHECK(spec.has_joint_table());
  CHECK(spec.marginal_p()[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(spec.marginal_p()[1] == doctest::Approx(0.7).epsilon(1e-14));

  const int reps = 20000;
  std::vector<int> freq(4, 0);
  Rng rng(1005);
  for (int k = 0; k < reps; ++k) {
    const std::vector<char> ind = spec.sample_indicators(rng);
    ++freq[(ind[0] ? 1 : 0) | (ind[1] ? 2 : 0)];
  }
  for (int mask = 0; mask < 4; ++mask) {
    const double got = static_cast<double>(freq[mask]) / reps;
    const double se = std::sqrt(joint[mask] * (1.0 - joint[mask]) / reps);
    CHECK(std::fabs(got - joint[mask]) <= 3.0 * se);
  }
}

TEST_CASE("window-dependent indicators") {
  const int n = 10;
  const double p = 0.3;
  const MarkedBernoulliSpec spec = MarkedBernoulliSpec::m_dependent(
      std::vector<double>(n, p), 1, MarkedBernoulliSpec::Marks::FixedGrid);
  CHECK_FALSE(spec.has_joint_table());
  CHECK_THROWS_AS(spec.joint_table(), DomainError);
  bool found0 = false, found1 = false;
  for (int j : spec.neighborhoods()[0]) {
    if (j == 0) found0 = true;
    if (j == 1) found1 = true;
  }
  CHECK(found0);
  CHECK(found1);

  const int reps = 30000;
  std::vector<double> ones(n, 0.0);
  double adjacent = 0.0, far = 0.0;
  Rng rng(1006);
  for (int k = 0; k < reps; ++k) {
    const std::vector<char> ind = spec.sample_indicators(rng);
    for (int i = 0; i < n; ++i) ones[i] += ind[i] ? 1.0 : 0.0;
    adjacent += (ind[3] && ind[4]) ? 1.0 : 0.0;
    far += (ind[2] && ind[7]) ? 1.0 : 0.0;
  }
  for (int i = 0; i < n; ++i) {
    const double got = ones[i] / reps;
    CHECK(std::fabs(got - p) <= 3.0 * std::sqrt(p * (1.0 - p) / reps));
  }
  const double q3 = std::pow(p, 1.5);  // shared latent: both fire iff three uniforms clear sqrt(p)
  CHECK(std::fabs(adjacent / reps - q3) <= 3.0 * std::sqrt(q3 * (1.0 - q3) / reps));
  const double pp = p * p;
  CHECK(std::fabs(far / reps - pp) <= 3.0 * std::sqrt(pp * (1.0 - pp) / reps));
  CHECK(adjacent / reps > pp);  // positive association inside the window
}

TEST_CASE("marked samples carry base and lifted layers") {
  const std::vector<double> p = {0.9, 0.1, 0.8};
  const MarkedBernoulliSpec spec =
      MarkedBernoulliSpec::independent(p, MarkedBernoulliSpec::Marks::FixedGrid);
  const MarkedBernoulliSample s = sample_marked_bernoulli(spec, 1007);
  REQUIRE(s.indicators.size() == 3);
  REQUIRE(s.marks.size() == 3);
  int fired = 0;
  for (int i = 0; i < 3; ++i) fired += s.indicators[i] ? 1 : 0;
  CHECK(s.base.size() == fired);
  CHECK(s.lifted.size() == fired);
  for (const Point& q : s.lifted.points) {
    CHECK(q.label >= 0);
    CHECK(q.label < 3);
    CHECK(s.indicators[q.label]);
    CHECK(q.coord[0] == doctest::Approx((q.label + 1) / 3.0).epsilon(1e-15));
  }
  for (const Point& q : s.base.points) CHECK(q.label == -1);
}

TEST_CASE("arrival distributions") {
  CHECK_THROWS_AS(ArrivalDist::exponential(0.0), DomainError);
  CHECK_THROWS_AS(ArrivalDist::discrete_slots({0.5, -0.1}), DomainError);
  CHECK_THROWS_AS(ArrivalDist::discrete_slots({0.8, 0.3}), DomainError);

  const ArrivalDist exp2 = ArrivalDist::exponential(2.0);
  CHECK_FALSE(exp2.is_discrete());
  CHECK(exp2.cdf(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(exp2.cdf(1.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(exp2.slot_pmf(), DomainError);

  const ArrivalDist slots = ArrivalDist::discrete_slots({0.3, 0.2});
  CHECK(slots.is_discrete());
  CHECK(slots.cdf(0.999) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(slots.cdf(1.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(slots.cdf(1.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(slots.cdf(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(slots.cdf(50.0) == doctest::Approx(0.5).epsilon(1e-15));

  const ArrivalDist defective = ArrivalDist::discrete_slots({0.3});
  Rng rng(1008);
  const int reps = 10000;
  int never = 0;
  for (int k = 0; k < reps; ++k) {
    const double t = defective.sample(rng);
    if (std::isinf(t))
      ++never;
    else
      CHECK(t == 1.0);
  }
  CHECK(std::fabs(static_cast<double>(never) / reps - 0.7) <= 3.0 * std::sqrt(0.21 / reps));
}

TEST_CASE("renewal stream with exponential gaps is a poisson stream") {
  const RenewalSpec spec{ArrivalDist::exponential(2.0), ArrivalDist::exponential(2.0), 5.0};
  const int reps = 5000;
  double total = 0.0;
  for (int k = 0; k < reps; ++k) {
    const Configuration c = sample_renewal(spec, derive_seed(1009, k));
    total += c.size();
    double prev = 0.0;
    for (const Point& q : c.points) {
      CHECK(q.coord[0] > prev);
      CHECK(q.coord[0] <= 1.0);
      prev = q.coord[0];
    }
  }
  const double lambda = 10.0;
  CHECK(std::fabs(total / reps - lambda) <= 3.0 * std::sqrt(lambda / reps));

  RenewalSpec bad = spec;
  bad.horizon = 0.0;
  CHECK_THROWS_AS(sample_renewal(bad, 1), DomainError);

  Rng stream(555);
  const Configuration via_stream = sample_renewal(spec, stream);
  const Configuration via_seed = sample_renewal(spec, 555);
  CHECK(via_stream.same_multiset(via_seed));
}

TEST_CASE("superposition of renewal components") {
  const RenewalSpec a{ArrivalDist::discrete_slots({0.5, 0.3}), ArrivalDist::discrete_slots({0.6, 0.2}), 6.0};
  const RenewalSpec b{ArrivalDist::exponential(1.0), ArrivalDist::exponential(1.0), 6.0};
  CHECK_THROWS_AS(sample_superposition({}, {}, 1), DomainError);
  CHECK_THROWS_AS(sample_superposition({a, b}, {0}, 1), DomainError);
  RenewalSpec c = b;
  c.horizon = 7.0;
  CHECK_THROWS_AS(sample_superposition({a, c}, {0, 1}, 1), DomainError);

  const Configuration single = sample_superposition({a}, {0}, 2024);
  const Configuration direct = sample_renewal(a, derive_seed(2024, 0));
  CHECK(single.same_multiset(direct));

  // Components in one group consume a single stream in order.
  Rng shared(derive_seed(2025, 0));
  Configuration manual = sample_renewal(a, shared);
  for (const Point& q : sample_renewal(b, shared).points) manual.add(q);
  const Configuration grouped = sample_superposition({a, b}, {0, 0}, 2025);
  CHECK(grouped.same_multiset(manual));

  const Configuration split = sample_superposition({a, b}, {0, 1}, 2025);
  Rng ra(derive_seed(2025, 0)), rb(derive_seed(2025, 1));
  Configuration manual2 = sample_renewal(a, ra);
  for (const Point& q : sample_renewal(b, rb).points) manual2.add(q);
  CHECK(split.same_multiset(manual2));
}

TEST_CASE("configuration csv output") {
  Configuration c;
  c.add(Point::labelled(2, Point::at(0.5)));
  c.add(Point::atom_index(1));
  const std::string csv = configuration_csv(c);
  CHECK(csv == "label,x\n2,0.5\n,1\n");

  Configuration plane;
  plane.add(Point::at(0.25, 0.75));
  CHECK(configuration_csv(plane) == "label,x0,x1\n,0.25,0.75\n");
  CHECK(configuration_csv(Configuration{}) == "label,x\n");
}
