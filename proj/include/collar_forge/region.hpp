#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "collar_forge/error.hpp"
#include "collar_forge/point.hpp"
#include "collar_forge/sampling.hpp"

namespace collar_forge {

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Closed ball of the given radius.
struct Ball {
  Point center;
  double radius = 0.0;
};

/// The sphere (circle in the plane) of the given radius; a curve, not a disk.
struct Circle {
  Point center;
  double radius = 0.0;
};

/// Closed axis-aligned box; bounds may be infinite.
struct Box {
  Point lo;
  Point hi;
};

struct Polyline {
  std::vector<Point> vertices;
  bool closed = false;
};

/// The closed half-space {p : normal . p >= offset}.
struct HalfSpace {
  Point normal;
  double offset = 0.0;
};

/// A finite sample of a set. `resolution` is the covering radius of the
/// sample; distances to it overestimate the true infimum by at most that much.
struct PointCloud {
  std::vector<Point> points;
  double resolution = 0.0;
};

struct EmptySet {};

using Shape = std::variant<EmptySet, Ball, Circle, Box, Polyline, HalfSpace, PointCloud>;

/// A shape or its complement. Cover members use the interior of the set.
struct SetDescriptor {
  Shape shape;
  bool complement = false;

  static SetDescriptor empty() { return {EmptySet{}, false}; }
  static SetDescriptor everything() { return {EmptySet{}, true}; }
  bool is_empty() const { return !complement && std::holds_alternative<EmptySet>(shape); }
  bool is_everything() const { return complement && std::holds_alternative<EmptySet>(shape); }
};

inline SetDescriptor complement_of(SetDescriptor s) {
  s.complement = !s.complement;
  return s;
}

namespace detail {

inline double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return euclidean_distance(p, a + s * ab);
}

inline double distance_to_shape(const Point& p, const Shape& shape) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EmptySet>) {
          return kInfiniteDistance;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return std::max(0.0, euclidean_distance(p, s.center) - s.radius);
        } else if constexpr (std::is_same_v<T, Circle>) {
          return std::abs(euclidean_distance(p, s.center) - s.radius);
        } else if constexpr (std::is_same_v<T, Box>) {
          p.check_same_dim(s.lo);
          double acc = 0.0;
          for (std::size_t i = 0; i < p.dim(); ++i) {
            const double d = std::max({s.lo[i] - p[i], 0.0, p[i] - s.hi[i]});
            acc += d * d;
          }
          return std::sqrt(acc);
        } else if constexpr (std::is_same_v<T, Polyline>) {
          if (s.vertices.empty()) return kInfiniteDistance;
          if (s.vertices.size() == 1) return euclidean_distance(p, s.vertices.front());
          double best = kInfiniteDistance;
          const std::size_t n = s.vertices.size();
          const std::size_t segs = s.closed ? n : n - 1;
          for (std::size_t i = 0; i < segs; ++i)
            best = std::min(best, segment_distance(p, s.vertices[i], s.vertices[(i + 1) % n]));
          return best;
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return std::max(0.0, (s.offset - dot(s.normal, p)) / norm(s.normal));
        } else {
          double best = kInfiniteDistance;
          for (const auto& q : s.points) best = std::min(best, euclidean_distance(p, q));
          return best;
        }
      },
      shape);
}

inline double distance_to_shape_complement(const Point& p, const Shape& shape) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EmptySet>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return std::max(0.0, s.radius - euclidean_distance(p, s.center));
        } else if constexpr (std::is_same_v<T, Box>) {
          p.check_same_dim(s.lo);
          double best = kInfiniteDistance;
          for (std::size_t i = 0; i < p.dim(); ++i) {
            if (p[i] <= s.lo[i] || p[i] >= s.hi[i]) return 0.0;
            best = std::min({best, p[i] - s.lo[i], s.hi[i] - p[i]});
          }
          return best;
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return std::max(0.0, (dot(s.normal, p) - s.offset) / norm(s.normal));
        } else if constexpr (std::is_same_v<T, PointCloud>) {
          throw Error(ErrorKind::InvalidArgument,
                      "distance to the complement of a point cloud is not supported");
        } else {
          // Curves have empty interior; their complement is dense.
          return 0.0;
        }
      },
      shape);
}

}  // namespace detail

/// Infimum distance from p to the set S (Euclidean ambient metric).
///
/// Exact for analytic shapes. For a PointCloud it is the minimum over the
/// samples, an upper bound of the true infimum within `resolution`.
/// Returns kInfiniteDistance for the empty set.
inline double dist_to_set(const Point& p, const SetDescriptor& set) {
  return set.complement ? detail::distance_to_shape_complement(p, set.shape)
                        : detail::distance_to_shape(p, set.shape);
}

/// Distance from p to the complement of S; positive exactly on the interior of S.
inline double interior_margin(const Point& p, const SetDescriptor& set) {
  return dist_to_set(p, complement_of(set));
}

inline bool in_closure(const Point& p, const SetDescriptor& set, double tol = 0.0) {
  return dist_to_set(p, set) <= tol;
}

inline bool in_interior(const Point& p, const SetDescriptor& set) {
  return interior_margin(p, set) > 0.0;
}

/// Axis-aligned bounding box of the relevant geometry.
inline bool box_is_bounded(const Box& b) {
  for (std::size_t i = 0; i < b.lo.dim(); ++i)
    if (!std::isfinite(b.lo[i]) || !std::isfinite(b.hi[i])) return false;
  return true;
}

inline double box_diameter(const Box& b) {
  return euclidean_distance(b.lo, b.hi);
}

/// Deterministic low-discrepancy points inside a region.
///
/// Boxes and balls are filled; circles and polylines are sampled along their
/// arc length. Complements, half-spaces, and zero-volume boxes are rejected.
inline std::vector<Point> quasi_random_sample(const SetDescriptor& region, std::size_t n,
                                              std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
  if (region.complement)
    throw Error(ErrorKind::DegenerateRegion, "cannot sample the complement of a region");
  return std::visit(
      [&](const auto& s) -> std::vector<Point> {
        using T = std::decay_t<decltype(s)>;
        std::vector<Point> out;
        out.reserve(n);
        if constexpr (std::is_same_v<T, Box>) {
          const std::size_t dim = s.lo.dim();
          for (std::size_t i = 0; i < dim; ++i)
            if (!(s.hi[i] > s.lo[i]) || !std::isfinite(s.hi[i] - s.lo[i]))
              throw Error(ErrorKind::DegenerateRegion, "box has zero or infinite extent");
          HaltonSequence seq(dim, seed);
          for (std::size_t k = 0; k < n; ++k) {
            const auto u = seq.at(k);
            Point p = Point::zeros(dim);
            for (std::size_t i = 0; i < dim; ++i) p[i] = s.lo[i] + u[i] * (s.hi[i] - s.lo[i]);
            out.push_back(std::move(p));
          }
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (!(s.radius > 0.0)) throw Error(ErrorKind::DegenerateRegion, "ball radius <= 0");
          const std::size_t dim = s.center.dim();
          HaltonSequence seq(dim, seed);
          for (std::uint64_t k = 0; out.size() < n; ++k) {
            const auto u = seq.at(k);
            Point p = Point::zeros(dim);
            double r2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
              const double c = 2.0 * u[i] - 1.0;
              r2 += c * c;
              p[i] = s.center[i] + s.radius * c;
            }
            if (r2 <= 1.0) out.push_back(std::move(p));
          }
        } else if constexpr (std::is_same_v<T, Circle>) {
          if (!(s.radius > 0.0) || s.center.dim() != 2)
            throw Error(ErrorKind::DegenerateRegion, "circle needs dim 2 and radius > 0");
          HaltonSequence seq(1, seed);
          for (std::size_t k = 0; k < n; ++k) {
            const double a = 2.0 * std::numbers::pi * seq.at(k)[0];
            out.push_back(Point{s.center[0] + s.radius * std::cos(a),
                                s.center[1] + s.radius * std::sin(a)});
          }
        } else if constexpr (std::is_same_v<T, Polyline>) {
          const std::size_t nv = s.vertices.size();
          const std::size_t segs = nv < 2 ? 0 : (s.closed ? nv : nv - 1);
          std::vector<double> cum{0.0};
          for (std::size_t i = 0; i < segs; ++i)
            cum.push_back(cum.back() +
                          euclidean_distance(s.vertices[i], s.vertices[(i + 1) % nv]));
          if (segs == 0 || !(cum.back() > 0.0))
            throw Error(ErrorKind::DegenerateRegion, "polyline has zero length");
          HaltonSequence seq(1, seed);
          for (std::size_t k = 0; k < n; ++k) {
            const double arc = seq.at(k)[0] * cum.back();
            const auto it = std::upper_bound(cum.begin(), cum.end(), arc);
            const std::size_t i = std::min<std::size_t>(it - cum.begin() - 1, segs - 1);
            const double len = cum[i + 1] - cum[i];
            const double f = len > 0.0 ? (arc - cum[i]) / len : 0.0;
            const Point& a = s.vertices[i];
            const Point& b = s.vertices[(i + 1) % nv];
            out.push_back(a + f * (b - a));
          }
        } else {
          throw Error(ErrorKind::DegenerateRegion,
                      "region has no volume and no curve parametrization");
        }
        return out;
      },
      region.shape);
}

}  // namespace collar_forge
