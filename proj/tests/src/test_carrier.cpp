#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "steinpp/assignment.hpp"
#include "steinpp/carrier.hpp"
#include "steinpp/metrics.hpp"
#include "steinpp/rng.hpp"

using namespace steinpp;

namespace {

double brute_assignment(const CostMatrix& cost) {
  std::vector<int> rows(cost.m);
  std::iota(rows.begin(), rows.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (int c = 0; c < cost.n; ++c) s += cost.at(rows[c], c);
    best = std::min(best, s);
  } while (std::next_permutation(rows.begin(), rows.end()));
  return best;
}

}  // namespace

TEST_CASE("interval and cube distances") {
  const CarrierSpace line = CarrierSpace::interval();
  CHECK(line.distance(Point::at(0.2), Point::at(0.9)) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(line.distance(Point::at(0.4), Point::at(0.4)) == 0.0);
  const CarrierSpace square = CarrierSpace::cube(2);
  CHECK(square.distance(Point::at(0.0, 0.0), Point::at(0.3, 0.4)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(square.distance(Point::at(0.0, 0.0), Point::at(1.0, 1.0)) == 1.0);  // capped at 1
  CHECK_THROWS_AS(line.validate_point(Point::at(1.5)), DomainError);
  CHECK_THROWS_AS(line.validate_point(Point::atom_index(0)), DomainError);
  CHECK_THROWS_AS(CarrierSpace::cube(0), DomainError);
}

TEST_CASE("finite atom spaces validate their matrices") {
  CHECK_THROWS_AS(CarrierSpace::finite_atoms({{0.0, 0.5}, {0.4, 0.0}}), DomainError);   // asymmetric
  CHECK_THROWS_AS(CarrierSpace::finite_atoms({{0.1}}), DomainError);                    // nonzero diagonal
  CHECK_THROWS_AS(CarrierSpace::finite_atoms({{0.0, 2.0}, {2.0, 0.0}}), DomainError);   // out of range
  CHECK_THROWS_AS(CarrierSpace::finite_atoms({{0.0, 0.9, 0.1}, {0.9, 0.0, 0.1}, {0.1, 0.1, 0.0}}),
                  DomainError);  // triangle inequality fails
  const CarrierSpace atoms = CarrierSpace::finite_atoms_on_interval({0.1, 0.4, 0.9});
  CHECK(atoms.atom_count() == 3);
  CHECK(atoms.atom_distance(0, 2) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(atoms.distance(Point::atom_index(0), Point::atom_index(1)) ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(atoms.validate_point(Point::atom_index(3)), DomainError);
}

TEST_CASE("lifted spaces measure the base part only") {
  const CarrierSpace lifted = CarrierSpace::lifted(4, CarrierSpace::interval());
  const Point a = Point::labelled(0, Point::at(0.2));
  const Point b = Point::labelled(3, Point::at(0.5));
  CHECK(lifted.distance(a, b) == doctest::Approx(0.3).epsilon(1e-15));
  const Point c = Point::labelled(1, Point::at(0.2));
  CHECK(lifted.distance(a, c) == 0.0);
  CHECK_THROWS_AS(lifted.validate_point(Point::labelled(4, Point::at(0.2))), DomainError);
}

TEST_CASE("configuration multiset equality") {
  Configuration a, b;
  a.add(Point::at(0.1));
  a.add(Point::at(0.7));
  b.add(Point::at(0.7));
  b.add(Point::at(0.1));
  CHECK(a.same_multiset(b));
  b.add(Point::at(0.1));
  CHECK_FALSE(a.same_multiset(b));
}

TEST_CASE("assignment solves a hand-checked matrix") {
  CostMatrix cost(3, 3);
  const double vals[3][3] = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cost.at(r, c) = vals[r][c];
  const AssignmentResult res = assignment_solve(cost);
  CHECK(res.total == doctest::Approx(5.0).epsilon(1e-15));  // rows (1,0,2) onto columns (0,1,2)
  CHECK(res.match[0] == 1);
  CHECK(res.match[1] == 0);
  CHECK(res.match[2] == 2);
}

TEST_CASE("assignment matches exhaustive search on random matrices") {
  Rng rng(811);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform_index(6));
    CostMatrix cost(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) cost.at(r, c) = rng.uniform();
    CHECK(assignment_solve(cost).total == doctest::Approx(brute_assignment(cost)).epsilon(1e-12));
  }
}

TEST_CASE("assignment handles rectangles and empty input") {
  CostMatrix cost(3, 1);
  cost.at(0, 0) = 0.9;
  cost.at(1, 0) = 0.2;
  cost.at(2, 0) = 0.4;
  CHECK(assignment_solve(cost).total == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(assignment_solve(CostMatrix(0, 0)).match.empty());
  CHECK_THROWS_AS(assignment_solve(CostMatrix(1, 2)), DomainError);
}

TEST_CASE("tie-broken assignment is lexicographically smallest") {
  CostMatrix cost(2, 2);
  cost.at(0, 0) = 0.0;
  cost.at(0, 1) = 1.0;
  cost.at(1, 0) = 1.0;
  cost.at(1, 1) = 0.0;
  const AssignmentResult res = min_cost_assignment(cost);
  CHECK(res.match[0] == 0);
  CHECK(res.match[1] == 1);

  // All-equal costs: every matching ties, the identity wins.
  CostMatrix flat(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) flat.at(r, c) = 0.5;
  const AssignmentResult id = min_cost_assignment(flat);
  CHECK(id.match == std::vector<int>{0, 1, 2});
}

TEST_CASE("matching distance on hand-checked configurations") {
  const CarrierSpace line = CarrierSpace::interval();
  Configuration a, b;
  a.add(Point::at(0.2));
  a.add(Point::at(0.5));
  b.add(Point::at(0.25));
  b.add(Point::at(0.5));
  CHECK(rho1(a, b, line) == doctest::Approx(0.025).epsilon(1e-14));
  Configuration single;
  single.add(Point::at(0.25));
  CHECK(d1_prime(a, single, line) == doctest::Approx(1.05).epsilon(1e-14));
  CHECK(rho1(a, single, line) == 1.0);  // different sizes
  CHECK(rho1(Configuration{}, Configuration{}, line) == 0.0);
  CHECK(d1_prime(Configuration{}, a, line) == 2.0);
}

TEST_CASE("matching distances are symmetric and bounded") {
  const CarrierSpace square = CarrierSpace::cube(2);
  Rng rng(812);
  for (int t = 0; t < 200; ++t) {
    Configuration a, b;
    const int na = static_cast<int>(rng.uniform_index(5));
    const int nb = static_cast<int>(rng.uniform_index(5));
    for (int i = 0; i < na; ++i) a.add(Point::at(rng.uniform(), rng.uniform()));
    for (int i = 0; i < nb; ++i) b.add(Point::at(rng.uniform(), rng.uniform()));
    const double r = rho1(a, b, square);
    CHECK(std::fabs(r - rho1(b, a, square)) <= 1e-12);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    const double d = d1_prime(a, b, square);
    CHECK(std::fabs(d - d1_prime(b, a, square)) <= 1e-12);
    CHECK(d >= std::abs(na - nb));
    CHECK(rho1(a, a, square) == 0.0);
    CHECK(d1_prime(a, a, square) == 0.0);
  }
}
