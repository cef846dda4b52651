#include "steinpp/carrier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace steinpp {

bool operator==(const Point& a, const Point& b) {
  return a.atom == b.atom && a.label == b.label && a.coord == b.coord;
}

bool operator<(const Point& a, const Point& b) {
  if (a.label != b.label) return a.label < b.label;
  if (a.atom != b.atom) return a.atom < b.atom;
  return a.coord < b.coord;
}

bool Configuration::same_multiset(const Configuration& other) const {
  if (points.size() != other.points.size()) return false;
  std::vector<Point> a = points;
  std::vector<Point> b = other.points;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

CarrierSpace CarrierSpace::interval() {
  CarrierSpace s;
  s.kind_ = Kind::Interval;
  s.dim_ = 1;
  return s;
}

CarrierSpace CarrierSpace::cube(int dim) {
  if (dim < 1) throw DomainError("cube: dimension must be >= 1");
  CarrierSpace s;
  s.kind_ = Kind::Cube;
  s.dim_ = dim;
  return s;
}

CarrierSpace CarrierSpace::finite_atoms(std::vector<std::vector<double>> matrix) {
  const int k = static_cast<int>(matrix.size());
  if (k == 0) throw DomainError("finite_atoms: need at least one atom");
  CarrierSpace s;
  s.kind_ = Kind::FiniteAtoms;
  s.atoms_ = k;
  s.matrix_.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(matrix[i].size()) != k) throw DomainError("finite_atoms: matrix must be square");
    for (int j = 0; j < k; ++j) {
      const double d = matrix[i][j];
      if (!(d >= 0.0) || d > 1.0 || !std::isfinite(d)) throw DomainError("finite_atoms: entries must lie in [0, 1]");
      s.matrix_[static_cast<std::size_t>(i) * k + j] = d;
    }
    if (matrix[i][i] != 0.0) throw DomainError("finite_atoms: diagonal must be zero");
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j)
      if (matrix[i][j] != matrix[j][i]) throw DomainError("finite_atoms: matrix must be symmetric");
  constexpr double kTriangleSlack = 1e-12;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l)
        if (matrix[i][j] > matrix[i][l] + matrix[l][j] + kTriangleSlack)
          throw DomainError("finite_atoms: triangle inequality violated");
  return s;
}

CarrierSpace CarrierSpace::finite_atoms_on_interval(const std::vector<double>& positions) {
  const int k = static_cast<int>(positions.size());
  std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m[i][j] = std::min(std::fabs(positions[i] - positions[j]), 1.0);
  return finite_atoms(std::move(m));
}

CarrierSpace CarrierSpace::lifted(int labels, CarrierSpace base) {
  if (labels < 1) throw DomainError("lifted: need at least one label");
  if (base.kind_ == Kind::Lifted) throw DomainError("lifted: base must not itself be lifted");
  CarrierSpace s;
  s.kind_ = Kind::Lifted;
  s.labels_ = labels;
  s.dim_ = base.dim_;
  s.atoms_ = base.atoms_;
  s.base_ = std::make_shared<CarrierSpace>(std::move(base));
  return s;
}

const CarrierSpace& CarrierSpace::base() const {
  if (!base_) throw DomainError("base: not a lifted space");
  return *base_;
}

double CarrierSpace::distance(const Point& a, const Point& b) const {
  switch (kind_) {
    case Kind::Interval:
      return std::min(std::fabs(a.coord[0] - b.coord[0]), 1.0);
    case Kind::Cube: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double d = a.coord[i] - b.coord[i];
        s += d * d;
      }
      return std::min(std::sqrt(s), 1.0);
    }
    case Kind::FiniteAtoms:
      return atom_distance(a.atom, b.atom);
    case Kind::Lifted:
      return base_->distance(a, b);
  }
  return 1.0;
}

void CarrierSpace::validate_point(const Point& p) const {
  switch (kind_) {
    case Kind::Interval:
    case Kind::Cube: {
      if (static_cast<int>(p.coord.size()) != dim_) throw DomainError("point: wrong dimension");
      for (double x : p.coord)
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("point: coordinate outside [0, 1]");
      break;
    }
    case Kind::FiniteAtoms: {
      if (p.atom < 0 || p.atom >= atoms_) throw DomainError("point: atom index out of range");
      break;
    }
    case Kind::Lifted: {
      if (p.label < 0 || p.label >= labels_) throw DomainError("point: label out of range");
      base_->validate_point(p);
      break;
    }
  }
}

std::string CarrierSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Interval: os << "interval"; break;
    case Kind::Cube: os << "cube(" << dim_ << ")"; break;
    case Kind::FiniteAtoms: os << "atoms(" << atoms_ << ")"; break;
    case Kind::Lifted: os << "lifted(" << labels_ << ", " << base_->describe() << ")"; break;
  }
  return os.str();
}

}  // namespace steinpp
