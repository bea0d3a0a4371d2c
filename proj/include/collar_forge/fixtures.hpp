#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/bicollar.hpp"
#include "collar_forge/collar.hpp"
#include "collar_forge/cover.hpp"
#include "collar_forge/error.hpp"
#include "collar_forge/metric.hpp"
#include "collar_forge/point.hpp"
#include "collar_forge/region.hpp"

namespace collar_forge {

using ParamList = std::vector<std::pair<std::string, double>>;

/// Serializable description of a chart: its kind, parameters and position in
/// the collar enumeration.
struct ChartSpec {
  std::string kind;
  ParamList params;
};

/// A base set B in an ambient X with a cover, local collars over the cover
/// members, and the partition-of-unity parameters.
struct Fixture {
  std::string name;
  ParamList params;
  MetricDomain dom;
  Cover cover;
  double delta = 0.0;
  double delta0 = 0.0;
  std::vector<LocalCollar> collars;
  std::vector<ChartSpec> charts;
  /// Enumeration of the collars as indices into the original list.
  std::vector<std::size_t> order;
  SideFn side;
};

/// Reorders collars, cover members and chart specs together; `order[k]` is
/// the current index placed at position k.
inline Fixture reorder(const Fixture& f, const std::vector<std::size_t>& order) {
  const std::size_t m = f.collars.size();
  std::vector<bool> seen(m, false);
  if (order.size() != m)
    throw Error(ErrorKind::InvalidArgument, "order must list each of the " + std::to_string(m) + " collars once");
  for (std::size_t k : order) {
    if (k >= m || seen[k])
      throw Error(ErrorKind::InvalidArgument, "order must be a permutation of the collar indices");
    seen[k] = true;
  }
  Fixture out = f;
  out.cover = f.cover.permuted(order);
  out.collars.clear();
  out.charts.clear();
  out.order.clear();
  for (std::size_t k : order) {
    out.collars.push_back(f.collars[k]);
    out.charts.push_back(f.charts[k]);
    out.order.push_back(f.order[k]);
  }
  return out;
}

struct AssembleOptions {
  PouOptions pou{};
  GlobalCollarOptions collar{};
};

inline PartitionOfUnity fixture_pou(const Fixture& f, const PouOptions& opts = {}) {
  return build_pou(f.cover, f.delta, f.delta0, f.dom, opts);
}

/// Builds and validates the global collar of a fixture.
inline GlobalCollar assemble(const Fixture& f, const AssembleOptions& opts = {}) {
  return build_global_collar(f.collars, fixture_pou(f, opts.pou), f.dom, opts.collar);
}

namespace detail {

inline constexpr double kPi = 3.14159265358979323846;

inline BaseSet circle_base(double r) {
  BaseSet b;
  b.param_dim = 1;
  b.at = [r](std::span<const double> u) {
    const double a = 2.0 * kPi * u[0];
    return Point{r * std::cos(a), r * std::sin(a)};
  };
  b.contains = [r](const Point& p) {
    return p.dim() == 2 && std::abs(norm(p) - r) <= 1e-12 * std::max(1.0, r);
  };
  return b;
}

}  // namespace detail

/// B the circle of radius r, X the closed disk, one radial collar
/// c(x,t) = (1 - t/2) x with image the annulus r/2 <= |y| <= r.
/// L(c) = max(1, r/2) and iL(c) = 2 sqrt(1 + 1/r^2).
inline Fixture make_circle_in_disk(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  Fixture f;
  f.name = "circle";
  f.params = {{"r", r}};
  f.dom.dim = 2;
  f.dom.base = detail::circle_base(r);
  f.dom.in_ambient = [r](const Point& p) { return norm(p) <= r * (1.0 + 1e-12); };
  f.dom.region_bounds = Box{{-1.1 * r, -1.1 * r}, {1.1 * r, 1.1 * r}};
  f.cover.labels = {"all"};
  f.cover.members = {SetDescriptor::everything()};
  f.delta = 1.0;
  f.delta0 = 0.5;

  LocalCollar c;
  c.name = "radial";
  c.base = f.dom.base;
  c.forward = [](const Point& x, double t) { return (1.0 - t / 2.0) * x; };
  c.locate = [r](const Point& y) -> std::optional<CollarPoint> {
    const double rho = norm(y);
    if (!(rho > 0.0)) return std::nullopt;
    const double t = 2.0 * (1.0 - rho / r);
    if (t < -1e-12 || t > 1.0 + 1e-12) return std::nullopt;
    return CollarPoint{(r / rho) * y, std::clamp(t, 0.0, 1.0)};
  };
  c.declared.lipschitz = std::max(1.0, r / 2.0);
  c.declared.inverse_lipschitz = 2.0 * std::sqrt(1.0 + 1.0 / (r * r));
  c.declared.bi_lipschitz = *c.declared.lipschitz * *c.declared.inverse_lipschitz;
  f.collars = {c};
  f.charts = {{"radial", {{"r", r}}}};
  f.order = {0};
  f.side = [r](const Point& p) {
    const double rho = norm(p);
    return rho < r ? Side::Plus : (rho > r ? Side::Minus : Side::Base);
  };
  return f;
}

/// The radial bicollar (1 - t/2) x, t in [-1,1], of the circle of radius r in
/// the disk of radius 2r; the plus side is the inside.
inline Bicollar make_circle_bicollar(double r) {
  const Fixture f = make_circle_in_disk(r);
  Bicollar b;
  b.name = "radial";
  b.base = f.dom.base;
  b.forward = [](const Point& x, double t) { return (1.0 - t / 2.0) * x; };
  b.side = f.side;
  return b;
}

/// B = [0,3] x {0}, X = {0 <= y <= 2, 0 <= x <= 3 + tilt y}. Two collars over
/// [0,2] and [1,3]: c1(x,t) = x + (0,t) and c2(x,t) = x + (tilt t, t).
inline Fixture make_strip_two_collar(double tilt) {
  if (!(std::abs(tilt) < 0.5)) throw Error(ErrorKind::InvalidArgument, "tilt must satisfy |tilt| < 0.5");
  Fixture f;
  f.name = "strip";
  f.params = {{"tilt", tilt}};
  f.dom.dim = 2;
  f.dom.base.param_dim = 1;
  f.dom.base.at = [](std::span<const double> u) { return Point{3.0 * u[0], 0.0}; };
  f.dom.base.contains = [](const Point& p) {
    return p.dim() == 2 && p[1] == 0.0 && p[0] >= 0.0 && p[0] <= 3.0;
  };
  f.dom.in_ambient = [tilt](const Point& p) {
    return p[1] >= 0.0 && p[1] <= 2.0 && p[0] >= 0.0 && p[0] <= 3.0 + tilt * p[1];
  };
  f.dom.region_bounds = Box{{-1.0, -1.0}, {4.0, 2.0}};
  f.cover.labels = {"left", "right"};
  f.cover.members = {{Box{{-1.0, -1.0}, {2.0, 1.0}}, false}, {Box{{1.0, -1.0}, {4.0, 1.0}}, false}};
  f.delta = 0.5;
  f.delta0 = 0.25;

  auto segment = [base = f.dom.base](double lo, double hi) {
    BaseSet b = base;
    b.at = [lo, hi](std::span<const double> u) { return Point{lo + (hi - lo) * u[0], 0.0}; };
    b.contains = [lo, hi](const Point& p) {
      return p.dim() == 2 && p[1] == 0.0 && p[0] >= lo && p[0] <= hi;
    };
    return b;
  };
  auto shear = [](double lo, double hi, double k, std::string name) {
    LocalCollar c;
    c.name = std::move(name);
    c.forward = [k](const Point& x, double t) { return Point{x[0] + k * t, t}; };
    c.locate = [k, lo, hi](const Point& y) -> std::optional<CollarPoint> {
      const double t = y[1];
      if (t < 0.0 || t > 1.0) return std::nullopt;
      const double x = y[0] - k * t;
      if (x < lo || x > hi) return std::nullopt;
      return CollarPoint{{x, 0.0}, t};
    };
    return c;
  };
  LocalCollar c1 = shear(0.0, 2.0, 0.0, "vertical");
  c1.base = segment(0.0, 2.0);
  c1.declared.lipschitz = 1.0;
  c1.declared.inverse_lipschitz = std::sqrt(2.0);
  c1.declared.bi_lipschitz = std::sqrt(2.0);
  LocalCollar c2 = shear(1.0, 3.0, tilt, "sheared");
  c2.base = segment(1.0, 3.0);
  c2.declared.lipschitz = std::sqrt(1.0 + tilt * tilt);
  f.collars = {c1, c2};
  f.charts = {{"shear", {{"lo", 0.0}, {"hi", 2.0}, {"tilt", 0.0}}},
              {"shear", {{"lo", 1.0}, {"hi", 3.0}, {"tilt", tilt}}}};
  f.order = {0, 1};
  return f;
}

namespace detail {

/// Point on the boundary of [0,s]^2 at arc-length fraction u, counterclockwise
/// from the origin.
inline Point square_perimeter_point(double s, double u) {
  const double d = 4.0 * s * u;
  if (d < s) return {d, 0.0};
  if (d < 2.0 * s) return {s, d - s};
  if (d < 3.0 * s) return {3.0 * s - d, s};
  if (d < 4.0 * s) return {0.0, 4.0 * s - d};
  return {0.0, 0.0};
}

inline bool on_square_boundary(double s, const Point& p) {
  if (p.dim() != 2) return false;
  const bool in_x = p[0] >= 0.0 && p[0] <= s;
  const bool in_y = p[1] >= 0.0 && p[1] <= s;
  return (in_x && (p[1] == 0.0 || p[1] == s)) || (in_y && (p[0] == 0.0 || p[0] == s));
}

inline bool in_closed_box(const Box& b, const Point& p) {
  for (std::size_t i = 0; i < p.dim(); ++i)
    if (p[i] < b.lo[i] || p[i] > b.hi[i]) return false;
  return true;
}

/// Farthest point of B n closed box from p; B meets the box in segments, so
/// segment endpoints suffice.
inline double square_member_radius(double s, const Box& box, const Point& p) {
  const Point corners[4] = {{0.0, 0.0}, {s, 0.0}, {s, s}, {0.0, s}};
  double r = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Point& a = corners[e];
    const Point& b = corners[(e + 1) % 4];
    const int axis = a[0] == b[0] ? 1 : 0;
    const double lo = std::max(std::min(a[axis], b[axis]), box.lo[axis]);
    const double hi = std::min(std::max(a[axis], b[axis]), box.hi[axis]);
    const int other = 1 - axis;
    if (lo > hi || a[other] < box.lo[other] || a[other] > box.hi[other]) continue;
    for (double v : {lo, hi}) {
      Point q = a;
      q[axis] = v;
      r = std::max(r, euclidean_distance(q, p));
    }
  }
  return r;
}

/// Minkowski gauge of z with respect to [0,s]^2 - p, and the binding face
/// (0: x = s, 1: x = 0, 2: y = s, 3: y = 0).
inline std::pair<double, int> square_gauge(double s, const Point& p, const Point& z) {
  const double cand[4] = {z[0] / (s - p[0]), -z[0] / p[0], z[1] / (s - p[1]), -z[1] / p[1]};
  int face = 0;
  for (int k = 1; k < 4; ++k)
    if (cand[k] > cand[face]) face = k;
  return {cand[face], face};
}

struct StarChart {
  double s = 2.0;
  Point center;
  double kappa = 0.5;
  Box member;
  BaseSet base;
};

/// Boundary point x with gauge 1 along the ray from the center through y, and
/// the scale g = |y - p| / |x - p|.
inline std::optional<std::pair<Point, double>> star_project(const StarChart& c, const Point& y) {
  const Point z = y - c.center;
  if (!(norm(z) > 0.0)) return std::nullopt;
  const auto [g, face] = square_gauge(c.s, c.center, z);
  if (!(g > 0.0)) return std::nullopt;
  Point x = c.center + (1.0 / g) * z;
  const int axis = face < 2 ? 0 : 1;
  x[axis] = (face == 0 || face == 2) ? c.s : 0.0;
  x[1 - axis] = std::clamp(x[1 - axis], 0.0, c.s);
  if (!c.base.contains(x)) return std::nullopt;
  return std::make_pair(x, g);
}

/// Chart p + (1 - dir kappa t)(x - p); dir = 1 points into the square.
inline LocalCollar star_collar(const StarChart& c, int dir, std::string name) {
  LocalCollar out;
  out.name = std::move(name);
  out.base = c.base;
  const double k = dir * c.kappa;
  out.forward = [p = c.center, k](const Point& x, double t) { return p + (1.0 - k * t) * (x - p); };
  out.locate = [c, k](const Point& y) -> std::optional<CollarPoint> {
    const auto proj = star_project(c, y);
    if (!proj) return std::nullopt;
    const double t = (1.0 - proj->second) / k;
    if (t < -1e-12 || t > 1.0 + 1e-12) return std::nullopt;
    return CollarPoint{proj->first, std::clamp(t, 0.0, 1.0)};
  };
  const double R = square_member_radius(c.s, c.member, c.center);
  out.declared.lipschitz = dir > 0 ? std::max(1.0, c.kappa * R) : std::max(1.0 + c.kappa, c.kappa * R);
  return out;
}

struct SquareLayout {
  std::vector<std::string> labels;
  std::vector<Box> members;
  std::vector<Point> centers;
  double delta = 0.0;
};

inline SquareLayout square_layout(double s, int n_collars) {
  SquareLayout l;
  const Point mid{s / 2.0, s / 2.0};
  auto center_toward = [&](const Box& b) {
    Point m{(b.lo[0] + b.hi[0]) / 2.0, (b.lo[1] + b.hi[1]) / 2.0};
    Point d = m - mid;
    const double nd = norm(d);
    return nd > 0.0 ? mid + (0.05 * s / nd) * d : mid;
  };
  if (n_collars == 4) {
    const double a = s / 4.0, e = s / 2.0;
    l.labels = {"bottom", "right", "top", "left"};
    l.members = {Box{{-e, -a}, {s + e, a}}, Box{{s - a, -e}, {s + a, s + e}},
                 Box{{-e, s - a}, {s + e, s + a}}, Box{{-a, -e}, {a, s + e}}};
    l.delta = a;
  } else if (n_collars == 8) {
    const double w = 0.4 * s, h = 0.15 * s, lo = 0.1 * s, hi = 0.9 * s;
    l.labels = {"corner_sw", "bottom", "corner_se", "right", "corner_ne", "top", "corner_nw", "left"};
    l.members = {Box{{-w, -w}, {w, w}},         Box{{lo, -h}, {hi, h}},
                 Box{{s - w, -w}, {s + w, w}},  Box{{s - h, lo}, {s + h, hi}},
                 Box{{s - w, s - w}, {s + w, s + w}}, Box{{lo, s - h}, {hi, s + h}},
                 Box{{-w, s - w}, {w, s + w}},  Box{{-h, lo}, {h, hi}}};
    l.delta = h;
  } else {
    throw Error(ErrorKind::InvalidArgument, "square fixture supports 4 or 8 collars");
  }
  for (const auto& b : l.members) l.centers.push_back(center_toward(b));
  return l;
}

inline Fixture square_fixture(double s, int n_collars, int dir, double kappa) {
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::InvalidArgument, "side must be positive");
  if (!(kappa > 0.0 && kappa < 1.0)) throw Error(ErrorKind::InvalidArgument, "kappa must lie in (0,1)");
  const SquareLayout l = square_layout(s, n_collars);
  Fixture f;
  f.params = {{"side", s}, {"collars", static_cast<double>(n_collars)}, {"kappa", kappa}};
  f.dom.dim = 2;
  f.dom.base.param_dim = 1;
  f.dom.base.at = [s](std::span<const double> u) { return square_perimeter_point(s, u[0]); };
  f.dom.base.contains = [s](const Point& p) { return on_square_boundary(s, p); };
  if (dir > 0) {
    f.name = "square";
    f.dom.in_ambient = [s](const Point& p) {
      return p[0] >= 0.0 && p[0] <= s && p[1] >= 0.0 && p[1] <= s;
    };
    f.dom.region_bounds = Box{{-0.25 * s, -0.25 * s}, {1.25 * s, 1.25 * s}};
  } else {
    f.name = "square-exterior";
    f.dom.in_ambient = [s](const Point& p) {
      const bool in_box = p[0] >= -0.5 * s && p[0] <= 1.5 * s && p[1] >= -0.5 * s && p[1] <= 1.5 * s;
      const bool inside = p[0] > 0.0 && p[0] < s && p[1] > 0.0 && p[1] < s;
      return in_box && !inside;
    };
    f.dom.region_bounds = Box{{-0.5 * s, -0.5 * s}, {1.5 * s, 1.5 * s}};
  }
  f.delta = l.delta;
  f.delta0 = l.delta / 2.0;
  for (std::size_t k = 0; k < l.members.size(); ++k) {
    StarChart c;
    c.s = s;
    c.center = l.centers[k];
    c.kappa = kappa;
    c.member = l.members[k];
    c.base = f.dom.base.restricted([box = l.members[k]](const Point& p) { return in_closed_box(box, p); });
    f.cover.labels.push_back(l.labels[k]);
    f.cover.members.push_back({l.members[k], false});
    f.collars.push_back(star_collar(c, dir, l.labels[k]));
    f.charts.push_back({"star",
                        {{"center_x", c.center[0]}, {"center_y", c.center[1]},
                         {"kappa", kappa}, {"direction", static_cast<double>(dir)},
                         {"box_lo_x", c.member.lo[0]}, {"box_lo_y", c.member.lo[1]},
                         {"box_hi_x", c.member.hi[0]}, {"box_hi_y", c.member.hi[1]}}});
    f.order.push_back(k);
  }
  f.side = [s](const Point& p) {
    if (p[0] > 0.0 && p[0] < s && p[1] > 0.0 && p[1] < s) return Side::Plus;
    return on_square_boundary(s, p) ? Side::Base : Side::Minus;
  };
  return f;
}

}  // namespace detail

/// B the boundary of [0,s]^2, X the closed square. Each cover member is an
/// axis-aligned box around an edge (4 collars) or around a corner or an edge
/// interior (8 collars); its collar is a star chart p + (1 - kappa t)(x - p)
/// toward an interior center p.
inline Fixture make_square_boundary(double side, int n_collars, double kappa = 0.5) {
  return detail::square_fixture(side, n_collars, 1, kappa);
}

/// The outside counterpart: X = [-s/2, 3s/2]^2 minus the open square, star
/// charts p + (1 + kappa t)(x - p) over the same cover.
inline Fixture make_square_exterior(double side, int n_collars, double kappa = 0.5) {
  return detail::square_fixture(side, n_collars, -1, kappa);
}

/// The local bicollars p + (1 - kappa t)(x - p), t in [-1,1], of a square
/// fixture's cover members.
inline std::vector<Bicollar> square_local_bicollars(const Fixture& interior, double kappa = 0.5) {
  std::vector<Bicollar> out;
  for (std::size_t k = 0; k < interior.collars.size(); ++k) {
    const auto& spec = interior.charts[k].params;
    const Point p{spec[0].second, spec[1].second};
    Bicollar b;
    b.name = interior.collars[k].name;
    b.base = interior.collars[k].base;
    b.forward = [p, kappa](const Point& x, double t) { return p + (1.0 - kappa * t) * (x - p); };
    b.side = interior.side;
    out.push_back(std::move(b));
  }
  return out;
}

/// The square boundary as a two-sided set: the global collars inside and
/// outside, glued into one bicollar, plus the local bicollars of the cover.
struct SquareBicollar {
  Fixture interior;
  Fixture exterior;
  GlobalCollar h_plus;
  GlobalCollar h_minus;
  Bicollar glued;
  std::vector<Bicollar> local;
};

inline SquareBicollar make_square_bicollar(double side, int n_collars, double kappa = 0.5,
                                           const AssembleOptions& opts = {}) {
  Fixture in = make_square_boundary(side, n_collars, kappa);
  Fixture out = make_square_exterior(side, n_collars, kappa);
  GlobalCollar hp = assemble(in, opts);
  GlobalCollar hm = assemble(out, opts);
  Bicollar glued = glue_bicollar(hp.as_local_collar("h+"), hm.as_local_collar("h-"), in.side);
  auto local = square_local_bicollars(in, kappa);
  return {std::move(in), std::move(out), std::move(hp), std::move(hm), std::move(glued), std::move(local)};
}

}  // namespace collar_forge
