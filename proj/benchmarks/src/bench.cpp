#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "steinpp/assignment.hpp"
#include "steinpp/carrier.hpp"
#include "steinpp/imdeath.hpp"
#include "steinpp/metrics.hpp"
#include "steinpp/palm.hpp"
#include "steinpp/rng.hpp"
#include "steinpp/univariate.hpp"

namespace {

using namespace steinpp;

CostMatrix random_cost(int n, std::uint64_t seed) {
  Rng rng(seed);
  CostMatrix cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost.at(i, j) = rng.uniform();
  return cost;
}

void BM_assignment(benchmark::State& state) {
  const CostMatrix cost = random_cost(static_cast<int>(state.range(0)), 21);
  for (auto _ : state) benchmark::DoNotOptimize(assignment_solve(cost).total);
}
BENCHMARK(BM_assignment)->Arg(8)->Arg(32)->Arg(128);

void BM_rho1(benchmark::State& state) {
  const CarrierSpace space = CarrierSpace::interval();
  Rng rng(22);
  Configuration a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a.add(Point::at(rng.uniform()));
    b.add(Point::at(rng.uniform()));
  }
  for (auto _ : state) benchmark::DoNotOptimize(rho1(a, b, space));
}
BENCHMARK(BM_rho1)->Arg(8)->Arg(16)->Arg(64);

void BM_poisson_binomial(benchmark::State& state) {
  Rng rng(23);
  BernoulliVector bv;
  for (int i = 0; i < state.range(0); ++i) bv.p.push_back(rng.uniform(0.0, 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(poisson_binomial_pmf(bv).p.size());
}
BENCHMARK(BM_poisson_binomial)->Arg(100)->Arg(1000);

void BM_stein_recursion(benchmark::State& state) {
  const CountSet a = CountSet::from_bits(0x2b5, 10);
  for (auto _ : state) benchmark::DoNotOptimize(stein_solution_recursive(a, 2.0, 10).f.back());
}
BENCHMARK(BM_stein_recursion);

void BM_spatial_path(benchmark::State& state) {
  const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval({0.2, 0.5, 0.8});
  const SpatialIntensity intensity = SpatialIntensity::discrete(carrier, {0.5, 0.3, 0.2});
  Configuration xi0;
  xi0.add(Point::atom_index(0));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_spatial_imdeath(xi0, intensity, 30.0, ++seed).events.size());
}
BENCHMARK(BM_spatial_path);

void BM_truncated_poisson(benchmark::State& state) {
  const CarrierSpace carrier =
      CarrierSpace::finite_atoms_on_interval({0.125, 0.25, 0.375, 0.5, 0.625, 0.75});
  const std::vector<double> means = {0.3, 0.2, 0.4, 0.1, 0.25, 0.15};
  const std::vector<int> caps(6, 6);
  for (auto _ : state)
    benchmark::DoNotOptimize(truncated_poisson_dist(carrier, means, caps, 1e-9).probs.size());
}
BENCHMARK(BM_truncated_poisson);

void BM_exact_d2(benchmark::State& state) {
  const CarrierSpace carrier = CarrierSpace::finite_atoms_on_interval({0.25, 0.5, 0.75});
  const std::vector<double> p = {0.2, 0.3, 0.25};
  const ConfigDistribution d = bernoulli_process_dist(carrier, p);
  const std::vector<int> caps = {6, 6, 6};
  const ConfigDistribution po = truncated_poisson_dist(carrier, p, caps, 1e-9);
  for (auto _ : state) benchmark::DoNotOptimize(exact_d2(d, po).value);
}
BENCHMARK(BM_exact_d2);

}  // namespace

BENCHMARK_MAIN();
