#ifndef STEINPP_TRANSPORT_HPP
#define STEINPP_TRANSPORT_HPP

#include <vector>

#include "steinpp/assignment.hpp"

namespace steinpp {

struct TransportEntry {
  int from = 0;
  int to = 0;
  double amount = 0.0;
};

struct TransportSolution {
  double cost = 0.0;
  double dual_value = 0.0;         // sum a_i u_i + sum b_j v_j at the final potentials
  std::vector<double> u, v;        // dual potentials, u_i + v_j <= c_ij
  std::vector<TransportEntry> plan;
};

/// Exact balanced transportation problem: minimize sum_{ij} x_ij c_ij subject
/// to row sums = supply, column sums = demand (totals must agree to 1e-9
/// relative; the demand side is rescaled to balance exactly). Successive
/// shortest augmenting paths with dual potentials on the bipartite graph;
/// nonnegative finite costs required. The dual potentials are returned so the
/// caller can verify optimality (primal = dual, complementary slackness).
TransportSolution solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                  const CostMatrix& cost);

}  // namespace steinpp

#endif
