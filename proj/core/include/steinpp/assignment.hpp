#ifndef STEINPP_ASSIGNMENT_HPP
#define STEINPP_ASSIGNMENT_HPP

#include <vector>

namespace steinpp {

/// Cost matrix with `rows() >= cols()` entries addressed as cost(r, c).
struct CostMatrix {
  int m = 0;  // rows
  int n = 0;  // cols
  std::vector<double> a;  // row-major m x n

  CostMatrix() = default;
  CostMatrix(int rows, int cols) : m(rows), n(cols), a(static_cast<std::size_t>(rows) * cols, 0.0) {}
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
};

struct AssignmentResult {
  double total = 0.0;
  /// match[c] = row assigned to column c (injective).
  std::vector<int> match;
};

/// Minimum-cost injective matching of the n columns into the m >= n rows
/// (Hungarian algorithm with dual potentials, O(n^2 m)). The reported total is
/// re-accumulated as sum_c cost(match[c], c) in increasing column order, so two
/// calls that select the same matching produce bitwise-identical totals.
/// Deterministic for a fixed matrix, but the matching among cost ties is
/// whatever the pivot order produces.
AssignmentResult assignment_solve(const CostMatrix& cost);

/// Same optimum, but among all minimum-cost matchings returns the one whose
/// match vector is lexicographically smallest (ties resolved column 0 first,
/// preferring smaller row indices; value-preservation checked to 1e-12
/// relative tolerance).
AssignmentResult min_cost_assignment(const CostMatrix& cost);

}  // namespace steinpp

#endif
