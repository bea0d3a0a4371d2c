#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "collar_forge/error.hpp"

namespace collar_forge {

/// A point of the ambient space R^n.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  explicit Point(std::span<const double> coords) : coords_(coords.begin(), coords.end()) {}
  static Point zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }
  const std::vector<double>& vec() const noexcept { return coords_; }

  bool finite() const {
    for (double c : coords_)
      if (!std::isfinite(c)) return false;
    return true;
  }

  Point& operator+=(const Point& o) {
    check_same_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    check_same_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (double& c : coords_) c *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend bool operator==(const Point&, const Point&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Point& p) {
    os << '(';
    for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? ", " : "") << p[i];
    return os << ')';
  }

  void check_same_dim(const Point& o) const {
    if (o.dim() != dim())
      throw Error(ErrorKind::DimensionMismatch,
                  "points of dimension " + std::to_string(dim()) + " and " +
                      std::to_string(o.dim()));
  }

 private:
  std::vector<double> coords_;
};

inline double dot(const Point& a, const Point& b) {
  a.check_same_dim(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Point& a) {
  double s = 0.0;
  for (double c : a.coords()) s += c * c;
  return std::sqrt(s);
}

inline double euclidean_distance(const Point& a, const Point& b) {
  a.check_same_dim(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// A pair (x, t) of a base point and a collar height.
struct CollarPoint {
  Point base;
  double height = 0.0;

  friend bool operator==(const CollarPoint&, const CollarPoint&) = default;
};

}  // namespace collar_forge
