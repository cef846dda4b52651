#include "steinpp/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "steinpp/errors.hpp"

namespace steinpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double matching_total(const CostMatrix& cost, const std::vector<int>& match) {
  double s = 0.0;
  for (int c = 0; c < cost.n; ++c) s += cost.at(match[c], c);
  return s;
}

}  // namespace

AssignmentResult assignment_solve(const CostMatrix& cost) {
  const int n = cost.n;  // items to place (columns)
  const int m = cost.m;  // slots (rows)
  if (m < n) throw DomainError("assignment_solve: need rows >= cols");
  AssignmentResult out;
  out.match.assign(n, -1);
  if (n == 0) return out;

  if (m <= 6) {
    // Exhaustive search. Distinct matchings can share the same real cost while
    // their floating-point column sums differ in the last bits, so the value
    // reported for small instances is the minimum over all of them.
    std::vector<int> rows(m);
    std::iota(rows.begin(), rows.end(), 0);
    double best = kInf;
    std::vector<int> best_rows;
    do {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += cost.at(rows[c], c);
      if (s < best) {
        best = s;
        best_rows.assign(rows.begin(), rows.begin() + n);
      }
    } while (std::next_permutation(rows.begin(), rows.end()));
    for (int c = 0; c < n; ++c) out.match[c] = best_rows[c];
    out.total = best;
    return out;
  }

  // Hungarian algorithm with dual potentials; items are introduced one at a
  // time and an augmenting path of minimal reduced cost is grown. 1-indexed
  // internally, index 0 is the sentinel.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);  // p[j] = item occupying slot j
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost.at(j - 1, i0 - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) out.match[p[j] - 1] = j - 1;
  out.total = matching_total(cost, out.match);
  return out;
}

AssignmentResult min_cost_assignment(const CostMatrix& cost) {
  const AssignmentResult base = assignment_solve(cost);
  const int n = cost.n;
  const int m = cost.m;
  if (n == 0) return base;
  const double tol = 1e-12 * std::max(1.0, std::fabs(base.total));

  // Fix columns left to right, always trying the smallest free row first and
  // keeping a choice iff the remaining subproblem can still reach the optimum.
  std::vector<int> fixed(n, -1);
  std::vector<char> row_used(m, 0);
  double fixed_cost = 0.0;
  for (int c = 0; c < n; ++c) {
    bool placed = false;
    for (int r = 0; r < m && !placed; ++r) {
      if (row_used[r]) continue;
      // Cost of the best completion with column c forced to row r.
      std::vector<int> rows_left;
      for (int r2 = 0; r2 < m; ++r2)
        if (!row_used[r2] && r2 != r) rows_left.push_back(r2);
      const int nc = n - c - 1;
      CostMatrix sub(static_cast<int>(rows_left.size()), nc);
      for (int rr = 0; rr < sub.m; ++rr)
        for (int cc = 0; cc < nc; ++cc) sub.at(rr, cc) = cost.at(rows_left[rr], c + 1 + cc);
      const double rest = nc > 0 ? assignment_solve(sub).total : 0.0;
      if (fixed_cost + cost.at(r, c) + rest <= base.total + tol) {
        fixed[c] = r;
        row_used[r] = 1;
        fixed_cost += cost.at(r, c);
        placed = true;
      }
    }
    if (!placed) throw DomainError("min_cost_assignment: internal inconsistency");
  }
  AssignmentResult out;
  out.match = fixed;
  out.total = matching_total(cost, fixed);
  return out;
}

}  // namespace steinpp
