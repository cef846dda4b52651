#include "steinpp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steinpp/errors.hpp"

namespace steinpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-13;

}  // namespace

TransportSolution solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                  const CostMatrix& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (cost.m != m || cost.n != n) throw DomainError("solve_transport: cost shape mismatch");
  double total_s = 0.0, total_d = 0.0;
  for (double x : supply) {
    if (!(x >= 0.0)) throw DomainError("solve_transport: negative supply");
    total_s += x;
  }
  for (double x : demand) {
    if (!(x >= 0.0)) throw DomainError("solve_transport: negative demand");
    total_d += x;
  }
  for (double c : cost.a)
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("solve_transport: costs must be finite and >= 0");
  if (std::fabs(total_s - total_d) > 1e-9 * std::max({1.0, total_s, total_d}))
    throw DomainError("solve_transport: supply and demand totals differ");

  TransportSolution sol;
  sol.u.assign(m, 0.0);
  sol.v.assign(n, 0.0);
  if (m == 0 || n == 0 || total_s <= kMassTol) return sol;

  std::vector<double> rs = supply;
  std::vector<double> rd = demand;
  const double scale = total_s / total_d;
  for (double& x : rd) x *= scale;

  // Potentials: reduced cost of arc i->j is c_ij + ps[i] - pc[j] >= 0.
  std::vector<double> ps(m, 0.0), pc(n, 0.0);
  std::vector<double> flow(static_cast<std::size_t>(m) * n, 0.0);
  auto flow_at = [&](int i, int j) -> double& { return flow[static_cast<std::size_t>(i) * n + j]; };

  double remaining = total_s;
  const int max_rounds = 64 * (m + n) + 1024;
  int rounds = 0;
  while (remaining > kMassTol) {
    if (++rounds > max_rounds) throw ResourceError("solve_transport: augmentation did not converge");
    // Multi-source Dijkstra from all suppliers with remaining mass to the
    // nearest consumer with remaining deficit, over forward arcs i->j and
    // backward arcs j->i (present where flow > 0, reduced cost clamped at 0).
    std::vector<double> ds(m, kInf), dc(n, kInf);
    std::vector<char> vs(m, 0), vc(n, 0);
    std::vector<int> parent_c(n, -1);  // supplier used to reach consumer j
    std::vector<int> parent_s(m, -1);  // consumer used to reach supplier i (backward)
    for (int i = 0; i < m; ++i)
      if (rs[i] > 0.0) ds[i] = 0.0;
    int target = -1;
    double dist_target = kInf;
    while (true) {
      int bi = -1, bj = -1;
      double best = kInf;
      for (int i = 0; i < m; ++i)
        if (!vs[i] && ds[i] < best) {
          best = ds[i];
          bi = i;
          bj = -1;
        }
      for (int j = 0; j < n; ++j)
        if (!vc[j] && dc[j] < best) {
          best = dc[j];
          bj = j;
          bi = -1;
        }
      if (best == kInf) break;
      if (bj >= 0) {
        vc[bj] = 1;
        if (rd[bj] > 0.0) {
          target = bj;
          dist_target = best;
          break;
        }
        // Relax backward arcs j -> i over the flow support.
        for (int i = 0; i < m; ++i) {
          if (vs[i] || flow_at(i, bj) <= 0.0) continue;
          const double rc = std::max(0.0, -(cost.at(i, bj) + ps[i] - pc[bj]));
          if (best + rc < ds[i]) {
            ds[i] = best + rc;
            parent_s[i] = bj;
          }
        }
      } else {
        vs[bi] = 1;
        for (int j = 0; j < n; ++j) {
          if (vc[j]) continue;
          const double rc = std::max(0.0, cost.at(bi, j) + ps[bi] - pc[j]);
          if (best + rc < dc[j]) {
            dc[j] = best + rc;
            parent_c[j] = bi;
          }
        }
      }
    }
    if (target < 0) {
      // Every reachable consumer is exactly satisfied. Residual mass at or
      // below the balance slack is rounding debris from the rescale and the
      // running subtraction, not a structural imbalance.
      if (remaining <= 1e-9 * std::max(1.0, total_s)) break;
      throw ResourceError("solve_transport: no augmenting path (unbalanced instance?)");
    }

    // Walk the path back to a source, recording arcs and the bottleneck.
    std::vector<std::pair<int, int>> path;  // forward arcs (i, j) in reverse order
    int j = target;
    double bottleneck = rd[target];
    while (true) {
      const int i = parent_c[j];
      path.emplace_back(i, j);
      if (parent_s[i] < 0) {
        bottleneck = std::min(bottleneck, rs[i]);
        break;
      }
      const int jprev = parent_s[i];
      bottleneck = std::min(bottleneck, flow_at(i, jprev));
      j = jprev;
    }
    const int source = path.back().first;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto [i, jj] = path[k];
      flow_at(i, jj) += bottleneck;
      if (k + 1 < path.size()) {
        double& back = flow_at(i, parent_s[i]);
        back -= bottleneck;
        if (back < 1e-18) back = 0.0;
      }
    }
    rs[source] -= bottleneck;
    rd[target] -= bottleneck;
    remaining -= bottleneck;

    // Standard potential update keeps all reduced costs nonnegative.
    for (int i = 0; i < m; ++i) ps[i] += std::min(ds[i], dist_target);
    for (int jj = 0; jj < n; ++jj) pc[jj] += std::min(dc[jj], dist_target);
  }

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (flow_at(i, j) > 0.0) {
        sol.plan.push_back({i, j, flow_at(i, j)});
        sol.cost += flow_at(i, j) * cost.at(i, j);
      }
  for (int i = 0; i < m; ++i) sol.u[i] = -ps[i];
  for (int j = 0; j < n; ++j) sol.v[j] = pc[j];
  sol.dual_value = 0.0;
  for (int i = 0; i < m; ++i) sol.dual_value += supply[i] * sol.u[i];
  for (int j = 0; j < n; ++j) sol.dual_value += demand[j] * scale * sol.v[j];
  return sol;
}

}  // namespace steinpp
