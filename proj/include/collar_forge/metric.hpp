#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/error.hpp"
#include "collar_forge/point.hpp"
#include "collar_forge/region.hpp"
#include "collar_forge/sampling.hpp"

namespace collar_forge {

using DistanceFn = std::function<double(const Point&, const Point&)>;
using PointPredicate = std::function<bool(const Point&)>;
using Parametrization = std::function<Point(std::span<const double>)>;

/// A closed subset described by a parametrization of a superset plus an
/// exact membership predicate.
///
/// Sampling maps Halton points of [0,1]^param_dim through `at` and keeps those
/// accepted by `contains`. Local perturbations for the Lipschitz estimators
/// also happen in parameter space, which keeps perturbed points on the set.
struct BaseSet {
  std::size_t param_dim = 1;
  Parametrization at;
  PointPredicate contains;

  /// Parameters (not points) of `n` accepted samples.
  std::vector<std::vector<double>> sample_params(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
    HaltonSequence seq(param_dim, seed);
    std::vector<std::vector<double>> out;
    out.reserve(n);
    const std::uint64_t max_draws = 1000 * static_cast<std::uint64_t>(n) + 10000;
    for (std::uint64_t k = 0; out.size() < n; ++k) {
      if (k >= max_draws)
        throw Error(ErrorKind::DegenerateRegion,
                    "base set rejected almost every parameter sample; is it empty?");
      auto u = seq.at(k);
      if (contains(at(u))) out.push_back(std::move(u));
    }
    return out;
  }

  std::vector<Point> sample(std::size_t n, std::uint64_t seed) const {
    std::vector<Point> out;
    out.reserve(n);
    for (const auto& u : sample_params(n, seed)) out.push_back(at(u));
    return out;
  }

  /// Same parametrization, stricter membership.
  BaseSet restricted(PointPredicate extra) const {
    BaseSet r = *this;
    r.contains = [outer = contains, extra = std::move(extra)](const Point& p) {
      return outer(p) && extra(p);
    };
    return r;
  }
};

/// Ambient space X (a subset of R^n with a distance) and its closed subset B.
struct MetricDomain {
  std::size_t dim = 2;
  DistanceFn dist = euclidean_distance;
  BaseSet base;
  /// Membership in the ambient space X. Defaults to all of R^n.
  PointPredicate in_ambient = [](const Point&) { return true; };
  Box region_bounds;

  bool in_base(const Point& p) const { return base.contains(p); }
  std::vector<Point> sample_base(std::size_t n, std::uint64_t seed) const {
    return base.sample(n, seed);
  }
  double bounds_diameter() const { return box_diameter(region_bounds); }
};

/// Product metric on B x [0,1]: dist(x, y) + |s - t|.
inline double product_distance(const CollarPoint& p, const CollarPoint& q, const MetricDomain& dom) {
  if (p.base.dim() != dom.dim || q.base.dim() != dom.dim)
    throw Error(ErrorKind::DimensionMismatch, "collar point dimension differs from the domain");
  return dom.dist(p.base, q.base) + std::abs(p.height - q.height);
}

struct MetricCheck {
  double max_asymmetry = 0.0;
  double max_triangle_violation = 0.0;
  bool zero_on_diagonal = true;
  bool positive_off_diagonal = true;
  bool base_samples_in_base = true;

  bool ok(double tol = 1e-12) const {
    return max_asymmetry == 0.0 && max_triangle_violation <= tol && zero_on_diagonal &&
           positive_off_diagonal && base_samples_in_base;
  }
};

/// Checks the metric axioms on consecutive sampled triples of B.
inline MetricCheck check_domain(const MetricDomain& dom, std::size_t samples, std::uint64_t seed) {
  MetricCheck out;
  const auto pts = dom.sample_base(samples, seed);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % pts.size()];
    const Point& c = pts[(i + 7) % pts.size()];
    if (!dom.in_base(a)) out.base_samples_in_base = false;
    if (dom.dist(a, a) != 0.0) out.zero_on_diagonal = false;
    const double ab = dom.dist(a, b);
    if (!(a == b) && !(ab > 0.0)) out.positive_off_diagonal = false;
    out.max_asymmetry = std::max(out.max_asymmetry, std::abs(ab - dom.dist(b, a)));
    out.max_triangle_violation =
        std::max(out.max_triangle_violation, dom.dist(a, c) - ab - dom.dist(b, c));
  }
  return out;
}

}  // namespace collar_forge
