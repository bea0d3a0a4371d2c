#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/collar.hpp"
#include "collar_forge/cover.hpp"
#include "collar_forge/error.hpp"
#include "collar_forge/metric.hpp"
#include "collar_forge/region.hpp"

namespace collar_forge {

struct RestrictOptions {
  /// Spacing of the anchor net on the base; 0 picks 1/16 of the sampled base extent.
  double net_spacing = 0.0;
  std::size_t base_samples = 2000;
  std::size_t height_steps = 32;
  double radius_resolution = 1e-6;
  std::uint64_t seed = 0;
};

/// A collar shortened fiberwise, (x,t) -> c(x, t d(x)), so that its image
/// avoids a closed set A.
struct RestrictedCollar {
  LocalCollar parent;
  std::function<double(const Point&)> cut;
  std::vector<Point> anchors;
  std::vector<double> radii;

  LocalCollar collar() const {
    LocalCollar out;
    out.name = parent.name + "|cut";
    out.base = parent.base;
    out.exact_inverse = parent.exact_inverse;
    out.forward = [c = parent.forward, d = cut](const Point& x, double t) {
      return c(x, t * d(x));
    };
    if (parent.locate) {
      out.locate = [loc = parent.locate, d = cut](const Point& y) -> std::optional<CollarPoint> {
        auto p = loc(y);
        if (!p) return std::nullopt;
        const double dx = d(p->base);
        if (p->height > dx * (1.0 + 1e-12)) return std::nullopt;
        return CollarPoint{p->base, std::min(1.0, p->height / dx)};
      };
    }
    return out;
  }
};

namespace detail {

inline Box bounding_box(const std::vector<Point>& pts, double pad) {
  Box b{pts.front(), pts.front()};
  for (const auto& p : pts)
    for (std::size_t i = 0; i < p.dim(); ++i) {
      b.lo[i] = std::min(b.lo[i], p[i]);
      b.hi[i] = std::max(b.hi[i], p[i]);
    }
  for (std::size_t i = 0; i < b.lo.dim(); ++i) {
    b.lo[i] -= pad;
    b.hi[i] += pad;
  }
  return b;
}

}  // namespace detail

/// Finds a cut function d : U -> (0,1] with c(x, [0, d(x)]) disjoint from A.
///
/// A greedy net of anchors x_k (spacing tau) is laid over the base. For each
/// anchor the largest radius r_k with c(V_k x [0, r_k]) n A empty is found by
/// bisection on samples, where V_k is the base within 2 tau of x_k. The radii
/// are blended with a Lipschitz partition of unity over the balls
/// B(x_k, 2 tau): d(x) = sum_k r_k lambda_k(x). Any active anchor certifies
/// its radius at x, so d(x) never exceeds a certified radius.
inline RestrictedCollar restrict_collar(const LocalCollar& c, const SetDescriptor& avoid,
                                        const RestrictOptions& opts = {}) {
  RestrictedCollar out;
  out.parent = c;
  if (avoid.is_empty()) {
    out.cut = [](const Point&) { return 1.0; };
    return out;
  }
  const auto samples = c.base.sample(opts.base_samples, opts.seed);
  for (const auto& x : samples)
    if (dist_to_set(x, avoid) <= 0.0)
      throw Error(ErrorKind::InvalidArgument, "the avoided set meets the collar base", {x.vec()});

  const Box extent = detail::bounding_box(samples, 0.0);
  double tau = opts.net_spacing;
  if (!(tau > 0.0)) tau = std::max(box_diameter(extent) / 16.0, 1e-6);
  const double radius = 2.0 * tau;
  const auto net = greedy_net(samples, tau, euclidean_distance);

  auto feasible = [&](const std::vector<const Point*>& patch, double r) {
    for (const Point* v : patch)
      for (std::size_t s = 0; s <= opts.height_steps; ++s) {
        const double t = r * static_cast<double>(s) / static_cast<double>(opts.height_steps);
        if (dist_to_set(c.forward(*v, t), avoid) <= 0.0) return false;
      }
    return true;
  };

  Cover cover;
  for (std::size_t k = 0; k < net.points.size(); ++k) {
    const Point& anchor = net.points[k];
    std::vector<const Point*> patch{&anchor};
    for (const auto& v : samples)
      if (euclidean_distance(v, anchor) < radius) patch.push_back(&v);
    double r = 1.0;
    if (!feasible(patch, 1.0)) {
      double lo = 0.0, hi = 1.0;
      while (hi - lo > opts.radius_resolution) {
        const double mid = 0.5 * (lo + hi);
        (feasible(patch, mid) ? lo : hi) = mid;
      }
      if (!(lo > 0.0))
        throw Error(ErrorKind::NumericFailure, "no positive cut radius near an anchor",
                    {anchor.vec()});
      r = lo;
    }
    out.anchors.push_back(anchor);
    out.radii.push_back(r);
    cover.labels.push_back("anchor" + std::to_string(k));
    cover.members.push_back({Ball{anchor, radius}, false});
  }

  MetricDomain sub;
  sub.dim = samples.front().dim();
  sub.base = c.base;
  sub.region_bounds = detail::bounding_box(samples, radius);
  auto pou = std::make_shared<PartitionOfUnity>(
      build_pou(cover, tau, tau / 2.0, sub, {opts.base_samples, opts.seed}));
  out.cut = [pou, radii = out.radii](const Point& x) {
    const auto w = pou->weights(x);
    double d = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) d += radii[k] * w[k];
    return d;
  };
  return out;
}

/// Joins collars over pairwise disjoint bases into one collar over the union.
///
/// `separations[a]` is an open region containing base a; the regions must be
/// pairwise disjoint. Each collar is first cut so its image stays inside its
/// region, then the union dispatches on base membership.
inline LocalCollar merge_discrete_collars(const std::vector<LocalCollar>& collars,
                                          const std::vector<SetDescriptor>& separations,
                                          const Box& bounds, const RestrictOptions& opts = {}) {
  if (collars.empty()) throw Error(ErrorKind::InvalidArgument, "no collars to merge");
  if (collars.size() != separations.size())
    throw Error(ErrorKind::InvalidArgument, "one separation region per collar is required");
  if (collars.size() == 1) return collars.front();

  std::vector<std::vector<Point>> base_samples;
  for (const auto& c : collars) base_samples.push_back(c.base.sample(opts.base_samples, opts.seed));
  for (std::size_t a = 0; a < collars.size(); ++a) {
    for (const auto& x : base_samples[a])
      if (!in_interior(x, separations[a]))
        throw Error(ErrorKind::InvalidArgument,
                    "base of '" + collars[a].name + "' is not inside its separation region",
                    {x.vec()});
    for (std::size_t b = a + 1; b < collars.size(); ++b) {
      double gap = kInfiniteDistance;
      for (const auto& x : base_samples[a]) {
        if (collars[b].base.contains(x))
          throw Error(ErrorKind::InvalidArgument, "collar bases overlap", {x.vec()});
        for (const auto& y : base_samples[b]) gap = std::min(gap, euclidean_distance(x, y));
      }
      if (!(gap > 0.0)) throw Error(ErrorKind::InvalidArgument, "collar bases touch");
    }
  }
  HaltonSequence probe(bounds.lo.dim(), opts.seed + 7);
  for (std::size_t k = 0; k < 20000; ++k) {
    const auto u = probe.at(k);
    Point p = Point::zeros(bounds.lo.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) p[i] = bounds.lo[i] + u[i] * (bounds.hi[i] - bounds.lo[i]);
    std::size_t hits = 0;
    for (const auto& s : separations) hits += in_interior(p, s) ? 1 : 0;
    if (hits > 1) throw Error(ErrorKind::InvalidArgument, "separation regions overlap", {p.vec()});
  }

  std::vector<LocalCollar> parts;
  for (std::size_t a = 0; a < collars.size(); ++a)
    parts.push_back(restrict_collar(collars[a], complement_of(separations[a]), opts).collar());

  std::size_t max_dim = 0;
  for (const auto& p : parts) max_dim = std::max(max_dim, p.base.param_dim);

  LocalCollar out;
  out.name = "merged";
  for (const auto& p : parts) out.exact_inverse = out.exact_inverse && p.exact_inverse;
  out.base.param_dim = max_dim + 1;
  out.base.at = [parts](std::span<const double> u) {
    const auto m = parts.size();
    const std::size_t a = std::min<std::size_t>(static_cast<std::size_t>(u[0] * m), m - 1);
    return parts[a].base.at(u.subspan(1, parts[a].base.param_dim));
  };
  out.base.contains = [parts](const Point& x) {
    for (const auto& p : parts)
      if (p.base.contains(x)) return true;
    return false;
  };
  out.forward = [parts](const Point& x, double t) {
    for (const auto& p : parts)
      if (p.base.contains(x)) return p.forward(x, t);
    throw Error(ErrorKind::OutsideBase, "point lies in no merged base", {x.vec()});
  };
  out.locate = [parts](const Point& y) -> std::optional<CollarPoint> {
    for (const auto& p : parts)
      if (p.locate)
        if (auto r = p.locate(y)) return r;
    return std::nullopt;
  };
  return out;
}

}  // namespace collar_forge
