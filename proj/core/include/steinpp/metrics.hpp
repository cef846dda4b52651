#ifndef STEINPP_METRICS_HPP
#define STEINPP_METRICS_HPP

#include "steinpp/assignment.hpp"
#include "steinpp/carrier.hpp"

namespace steinpp {

/// Normalized matching distance between configurations:
///   - 0 if both are empty,
///   - 1 if the sizes differ,
///   - otherwise min over pairings of the average ground distance.
/// Always in [0, 1]; a metric up to d0-zero identification.
double rho1(const Configuration& a, const Configuration& b, const CarrierSpace& space);

/// Unnormalized partial-matching distance: with m = max size, n = min size,
/// min over injective matchings of the smaller into the larger of the summed
/// ground distances, plus (m - n) for the unmatched points.
double d1_prime(const Configuration& a, const Configuration& b, const CarrierSpace& space);

/// Ground-distance cost matrix between two point sets (rows = a, cols = b).
CostMatrix pairwise_cost(const Configuration& a, const Configuration& b, const CarrierSpace& space);

}  // namespace steinpp

#endif
