#ifndef STEINPP_CARRIER_HPP
#define STEINPP_CARRIER_HPP

#include <memory>
#include <string>
#include <vector>

#include "steinpp/errors.hpp"

namespace steinpp {

/// A point of a carrier space. Coordinate-based spaces fill `coord`;
/// finite-atom spaces fill `atom`; lifted (labelled) spaces additionally
/// fill `label`. Unused fields stay at their defaults.
struct Point {
  std::vector<double> coord;
  int atom = -1;
  int label = -1;

  static Point at(double x) { return Point{{x}, -1, -1}; }
  static Point at(double x, double y) { return Point{{x, y}, -1, -1}; }
  static Point atom_index(int a) { return Point{{}, a, -1}; }
  static Point labelled(int label, Point base) {
    base.label = label;
    return base;
  }
};

bool operator==(const Point& a, const Point& b);
bool operator<(const Point& a, const Point& b);

/// A finite point configuration (multiset of carrier points).
struct Configuration {
  std::vector<Point> points;

  Configuration() = default;
  explicit Configuration(std::vector<Point> pts) : points(std::move(pts)) {}

  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }
  void add(Point p) { points.push_back(std::move(p)); }

  /// Multiset equality: permutation-invariant, exact coordinate comparison.
  bool same_multiset(const Configuration& other) const;
};

/// Bounded carrier space with its ground distance d0 <= 1 (a pseudo-metric is
/// allowed for FiniteAtoms and for lifted spaces, whose distance ignores the
/// label).
///
/// Variants:
///  - Interval:      [0, 1],   d0(x, y) = min(|x - y|, 1)
///  - Cube(d):       [0, 1]^d, d0(x, y) = min(euclidean, 1)
///  - FiniteAtoms(k): atoms {0..k-1} with an explicit k x k distance matrix
///  - Lifted(n, base): {0..n-1} x base, distance of the base parts only
class CarrierSpace {
 public:
  enum class Kind { Interval, Cube, FiniteAtoms, Lifted };

  static CarrierSpace interval();
  static CarrierSpace cube(int dim);
  /// `matrix` is row-major k x k; validated: symmetric, zero diagonal,
  /// entries in [0, 1], triangle inequality.
  static CarrierSpace finite_atoms(std::vector<std::vector<double>> matrix);
  /// Atoms at the given 1-d positions, distance min(|x - y|, 1).
  static CarrierSpace finite_atoms_on_interval(const std::vector<double>& positions);
  static CarrierSpace lifted(int labels, CarrierSpace base);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int atom_count() const { return atoms_; }
  int label_count() const { return labels_; }
  const CarrierSpace& base() const;
  double atom_distance(int a, int b) const { return matrix_[static_cast<std::size_t>(a) * atoms_ + b]; }

  /// Ground distance; always in [0, 1].
  double distance(const Point& a, const Point& b) const;

  /// Throws DomainError if the point does not belong to this space.
  void validate_point(const Point& p) const;

  std::string describe() const;

 private:
  CarrierSpace() = default;

  Kind kind_ = Kind::Interval;
  int dim_ = 1;
  int atoms_ = 0;
  int labels_ = 0;
  std::vector<double> matrix_;  // row-major atom distances
  std::shared_ptr<const CarrierSpace> base_;
};

}  // namespace steinpp

#endif
