#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "steinpp/rng.hpp"
#include "steinpp/univariate.hpp"

using namespace steinpp;

TEST_CASE("poisson pmf and caps") {
  const PmfTable t = poisson_pmf(2.0, 8);
  CHECK(t.p[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(t.p[3] == doctest::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-14));
  double sum = t.tail_mass;
  for (double x : t.p) sum += x;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(poisson_cap_for_tail(0.0, 1e-10) == 0);
  const int cap = poisson_cap_for_tail(1.0, 1e-10);
  CHECK(poisson_pmf(1.0, cap).tail_mass <= 1e-10);
  CHECK(poisson_pmf(1.0, cap - 1).tail_mass > 1e-10);
}

TEST_CASE("poisson binomial matches hand convolutions") {
  const PmfTable t = poisson_binomial_pmf(BernoulliVector{{0.1, 0.2}});
  REQUIRE(t.p.size() == 3);
  CHECK(t.p[0] == doctest::Approx(0.72).epsilon(1e-15));
  CHECK(t.p[1] == doctest::Approx(0.26).epsilon(1e-15));
  CHECK(t.p[2] == doctest::Approx(0.02).epsilon(1e-15));
  const PmfTable u = poisson_binomial_pmf(BernoulliVector{{0.5, 0.5}});
  CHECK(u.p[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.tail_mass == 0.0);
  CHECK_THROWS_AS(poisson_binomial_pmf(BernoulliVector{{1.2}}), DomainError);
  CHECK_THROWS_AS(poisson_binomial_pmf(BernoulliVector{{-0.1}}), DomainError);
}

TEST_CASE("total variation distance") {
  const PmfTable b = poisson_binomial_pmf(BernoulliVector{{0.5}});
  CHECK(total_variation(b, b) == 0.0);
  const PmfTable po = poisson_pmf(0.5);
  CHECK(total_variation(b, po) == doctest::Approx(0.1967346701436833).epsilon(1e-13));
  CHECK(total_variation(po, b) == total_variation(b, po));
  PmfTable d0, d2;
  d0.p = {1.0};
  d2.p = {0.0, 0.0, 1.0};
  CHECK(total_variation(d0, d2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("count sets resolve membership beyond the window") {
  const CountSet a = CountSet::from_bits(0b101, 4);
  CHECK(a.contains(0));
  CHECK_FALSE(a.contains(1));
  CHECK(a.contains(2));
  CHECK_FALSE(a.contains(7));
  const CountSet c = CountSet::complement_of_singleton(2, 4);
  CHECK(c.contains(0));
  CHECK_FALSE(c.contains(2));
  CHECK(c.contains(9));  // cofinal
  const CountSet s = CountSet::singleton(3, 5);
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(6));
}

TEST_CASE("stein solution satisfies its defining identity") {
  const CountSet a = CountSet::from_bits(0x155, 10);
  for (double lambda : {0.3, 1.0, 4.0}) {
    const SteinSolutionTable t = stein_solution_recursive(a, lambda, 10);
    CHECK(t.f[0] == 0.0);
    for (int w = 0; w <= 10; ++w) {
      const double ind = a.contains(w) ? 1.0 : 0.0;
      CHECK(std::fabs(lambda * t.f[w + 1] - w * t.f[w] - (ind - t.po_a)) <= 1e-12);
    }
  }
}

TEST_CASE("stein solution hand values and trivial sets") {
  const SteinSolutionTable t = stein_solution_recursive(CountSet::from_bits(0b1, 10), 1.0, 10);
  CHECK(t.po_a == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(t.f[1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));

  const SteinSolutionTable empty = stein_solution_recursive(CountSet::empty(10), 2.0, 10);
  for (double v : empty.f) CHECK(v == 0.0);
  const SteinSolutionTable full = stein_solution_recursive(CountSet::from_bits(0x7ff, 10, true), 2.0, 10);
  CHECK(full.po_a == doctest::Approx(1.0).epsilon(1e-14));
  for (double v : full.f) CHECK(std::fabs(v) <= 1e-13);
}

TEST_CASE("first differences stay under the classical envelope") {
  for (double lambda : {0.5, 3.0}) {
    const DeltaBoundReport rep = check_delta_bound(lambda, 8);
    CHECK(rep.pass);
    CHECK(rep.max_residual <= 1e-12);
    CHECK(rep.bound == doctest::Approx((1.0 - std::exp(-lambda)) / lambda).epsilon(1e-15));
  }
}

TEST_CASE("averaged identity recovers the probability difference") {
  const BernoulliVector bv{{0.3, 0.1, 0.25, 0.2}};
  const PmfTable w = poisson_binomial_pmf(bv);
  const double lambda = bv.lambda();
  Rng rng(813);
  for (int t = 0; t < 50; ++t) {
    const CountSet a = CountSet::from_bits(rng.bits() & 0x3ff, 9, rng.bernoulli(0.5));
    const SteinSolutionTable table = stein_solution_recursive(a, lambda, 12);
    double direct = 0.0;
    for (int k = 0; k < static_cast<int>(w.p.size()); ++k)
      direct += w.p[k] * ((a.contains(k) ? 1.0 : 0.0) - table.po_a);
    const double res = stein_identity_residual(w, table);
    CHECK(res == doctest::Approx(direct).epsilon(1e-10));
    CHECK(std::fabs(res) <= dtv_bound_independent(bv) + 1e-12);
  }
}

TEST_CASE("independent-sum error bound closed forms") {
  CHECK(dtv_bound_independent(BernoulliVector{{0.1, 0.1}}) == doctest::Approx(0.02).epsilon(1e-15));
  BernoulliVector hundred;
  hundred.p.assign(100, 0.01);
  CHECK(dtv_bound_independent(hundred) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(dtv_bound_independent(BernoulliVector{{0.5}}) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("expected reciprocal count matches enumeration") {
  CHECK(expected_reciprocal_count(BernoulliVector{{0.4}}, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(expected_reciprocal_count(BernoulliVector{{0.4, 0.3}}, 0) == doctest::Approx(0.85).epsilon(1e-14));
  const BernoulliVector bv{{0.3, 0.1, 0.0, 0.45, 0.2}};
  const int n = static_cast<int>(bv.p.size());
  for (int i = 0; i < n; ++i) {
    double expect = 0.0;
    for (int bits = 0; bits < (1 << n); ++bits) {
      if (bits & (1 << i)) continue;
      double prob = 1.0;
      int count = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool on = bits & (1 << j);
        prob *= on ? bv.p[j] : 1.0 - bv.p[j];
        count += on ? 1 : 0;
      }
      expect += prob / (count + 1.0);
    }
    CHECK(expected_reciprocal_count(bv, i) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("count chain trajectories are consistent") {
  const CountTrajectory t = simulate_count_imdeath(3, 0.0, 50.0, 814);
  CHECK(t.count_at(0.0) == 3);
  CHECK(t.final_count == 0);  // unit death rate empties the state well before t=50
  double last = 0.0;
  int w = t.w0;
  for (const auto& [time, delta] : t.events) {
    CHECK(time > last);
    last = time;
    w += delta;
    CHECK(w >= 0);
  }
  CHECK(w == t.final_count);
  CHECK(t.count_at(t.horizon) == t.final_count);
}

TEST_CASE("count chain mean relaxes toward the immigration rate") {
  const double lambda = 1.5, t = 1.2;
  const int w0 = 4, reps = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int k = 0; k < reps; ++k) {
    const int w = simulate_count_imdeath(w0, lambda, t, derive_seed(815, k)).final_count;
    sum += w;
    sumsq += static_cast<double>(w) * w;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
  const double target = lambda + (w0 - lambda) * std::exp(-t);
  CHECK(std::fabs(mean - target) <= 3.0 * se);
}

TEST_CASE("path estimator agrees with the recursion on a hand case") {
  const CountSet a = CountSet::from_bits(0b1, 10);  // the set {0}
  const ProbabilisticSolution est = stein_solution_probabilistic(a, 1.0, 1, 20000, 30.0, 816);
  CHECK(est.reps == 20000);
  CHECK(est.truncation_bound == doctest::Approx(std::exp(-30.0)).epsilon(1e-12));
  const double exact = 1.0 - std::exp(-1.0);
  CHECK(std::fabs(est.estimate - exact) <= 3.0 * est.se + est.truncation_bound);
  CHECK(est.se > 0.0);

  const ProbabilisticSolution zero = stein_solution_probabilistic(CountSet::empty(10), 1.0, 2, 500, 30.0, 817);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.se == 0.0);
}
