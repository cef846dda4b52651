#include "steinpp/metrics.hpp"

namespace steinpp {

CostMatrix pairwise_cost(const Configuration& a, const Configuration& b, const CarrierSpace& space) {
  CostMatrix cost(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) cost.at(i, j) = space.distance(a.points[i], b.points[j]);
  return cost;
}

double rho1(const Configuration& a, const Configuration& b, const CarrierSpace& space) {
  const int m = a.size();
  if (m != b.size()) return 1.0;
  if (m == 0) return 0.0;
  return assignment_solve(pairwise_cost(a, b, space)).total / m;
}

double d1_prime(const Configuration& a, const Configuration& b, const CarrierSpace& space) {
  const Configuration& big = a.size() >= b.size() ? a : b;
  const Configuration& small = a.size() >= b.size() ? b : a;
  const int m = big.size();
  const int n = small.size();
  if (n == 0) return static_cast<double>(m);
  return assignment_solve(pairwise_cost(big, small, space)).total + (m - n);
}

}  // namespace steinpp
