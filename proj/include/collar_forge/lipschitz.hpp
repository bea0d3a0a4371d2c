#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/collar.hpp"
#include "collar_forge/cover.hpp"
#include "collar_forge/error.hpp"
#include "collar_forge/metric.hpp"
#include "collar_forge/parallel.hpp"
#include "collar_forge/point.hpp"
#include "collar_forge/sampling.hpp"

namespace collar_forge {

/// A map sampled through a parametrization of its domain by [0,1]^param_dim.
/// `decode` returns nullopt for parameters outside the domain.
template <class In>
struct SampledMap {
  std::size_t param_dim = 1;
  std::function<std::optional<In>(std::span<const double>)> decode;
  std::function<double(const In&, const In&)> dist_in;
  std::function<Point(const In&)> map;
  /// Values of the last parameter that pairs are snapped to, e.g. height faces.
  std::vector<double> anchors;
};

template <class In>
using InputPair = std::pair<In, In>;

/// A map on a subset of B, with the ambient distance on inputs.
inline SampledMap<Point> point_map(const BaseSet& base, std::function<Point(const Point&)> f,
                                   DistanceFn dist = euclidean_distance) {
  SampledMap<Point> m;
  m.param_dim = base.param_dim;
  m.decode = [base](std::span<const double> u) -> std::optional<Point> {
    Point x = base.at(u);
    if (!base.contains(x)) return std::nullopt;
    return x;
  };
  m.dist_in = std::move(dist);
  m.map = std::move(f);
  return m;
}

/// A map on base x [lo, hi] with the product metric dist(x,y) + |s - t|.
/// Height faces lo, hi and the base slice t = 0 are snapping anchors.
inline SampledMap<CollarPoint> collar_map(const BaseSet& base,
                                          std::function<Point(const Point&, double)> f,
                                          double lo = 0.0, double hi = 1.0,
                                          DistanceFn dist = euclidean_distance) {
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, "height range must be nondegenerate");
  SampledMap<CollarPoint> m;
  m.param_dim = base.param_dim + 1;
  m.decode = [base, lo, hi](std::span<const double> u) -> std::optional<CollarPoint> {
    Point x = base.at(u.first(base.param_dim));
    if (!base.contains(x)) return std::nullopt;
    const double v = u[base.param_dim];
    const double t = v == 1.0 ? hi : lo + (hi - lo) * v;
    return CollarPoint{std::move(x), t};
  };
  m.dist_in = [dist](const CollarPoint& p, const CollarPoint& q) {
    return dist(p.base, q.base) + std::abs(p.height - q.height);
  };
  m.map = [f = std::move(f)](const CollarPoint& p) { return f(p.base, p.height); };
  m.anchors = {0.0, 1.0};
  if (lo < 0.0 && hi > 0.0) m.anchors.push_back(-lo / (hi - lo));
  return m;
}

inline SampledMap<CollarPoint> collar_map(const LocalCollar& c) {
  return collar_map(c.base, c.forward);
}

struct PairOptions {
  std::size_t pairs = 10000;
  /// Share of pairs drawn independently; the rest are local perturbations.
  double global_fraction = 0.5;
  std::vector<double> scales = {1e-2, 1e-4};
  std::uint64_t seed = 0;
  std::size_t max_redraws = 100;
};

/// Draws input pairs in parameter space. Global pairs are independent uniform
/// draws; local pairs perturb the first point by the listed scales. A quarter
/// of the first points, and an eighth of the second points of global pairs,
/// are snapped to an anchor of the last parameter. The sequence depends only
/// on the map's parametrization and the options.
template <class In>
std::vector<InputPair<In>> sample_pairs(const SampledMap<In>& m, const PairOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::vector<InputPair<In>> out;
  out.reserve(opts.pairs);
  const std::size_t k = m.param_dim;
  const auto n_global =
      static_cast<std::size_t>(std::llround(opts.global_fraction * static_cast<double>(opts.pairs)));
  auto draw = [&](std::vector<double>& u) {
    for (auto& c : u) c = unit_double(rng);
  };
  auto snap = [&](std::vector<double>& u, double prob) {
    if (m.anchors.empty()) return;
    if (unit_double(rng) < prob)
      u[k - 1] = m.anchors[static_cast<std::size_t>(unit_double(rng) * m.anchors.size())];
  };
  for (std::size_t i = 0; i < opts.pairs; ++i) {
    const bool global = i < n_global;
    const double scale = opts.scales.empty() ? 1e-2 : opts.scales[i % opts.scales.size()];
    for (std::size_t attempt = 0; attempt < opts.max_redraws; ++attempt) {
      std::vector<double> u(k), v(k);
      draw(u);
      snap(u, 0.25);
      if (global) {
        draw(v);
        if (unit_double(rng) < 0.125 && !m.anchors.empty()) v[k - 1] = u[k - 1];
        else snap(v, 0.125);
      } else {
        for (std::size_t d = 0; d < k; ++d)
          v[d] = std::clamp(u[d] + scale * (2.0 * unit_double(rng) - 1.0), 0.0, 1.0);
      }
      auto a = m.decode(u);
      auto b = m.decode(v);
      if (a && b) {
        out.emplace_back(std::move(*a), std::move(*b));
        break;
      }
    }
  }
  return out;
}

enum class QuotientKind { Forward, Inverse };

template <class In>
struct Estimate {
  double value = 0.0;
  std::optional<InputPair<In>> witness;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  std::vector<double> quotients;
};

namespace detail {

inline std::vector<double> flatten(const Point& p) { return p.vec(); }
inline std::vector<double> flatten(const CollarPoint& p) {
  auto v = p.base.vec();
  v.push_back(p.height);
  return v;
}

}  // namespace detail

/// Input pairs closer than this are skipped.
inline constexpr double kDegeneratePair = 1e-12;

/// dist(f(a), f(b)) / dist(a, b) for Forward, the reciprocal for Inverse.
/// Returns nullopt for degenerate input pairs; an Inverse quotient of two
/// distinct inputs with equal images is infinite.
template <class In>
std::optional<double> quotient(const SampledMap<In>& m, const In& a, const In& b, QuotientKind kind) {
  const double din = m.dist_in(a, b);
  if (!(din >= kDegeneratePair)) return std::nullopt;
  const double dout = euclidean_distance(m.map(a), m.map(b));
  if (kind == QuotientKind::Forward) return dout / din;
  return dout > 0.0 ? din / dout : std::numeric_limits<double>::infinity();
}

/// Maximum quotient over the pairs; a lower bound of the true constant.
/// Ties go to the lexicographically smallest pair.
template <class In>
Estimate<In> estimate_quotient(const SampledMap<In>& m, const std::vector<InputPair<In>>& pairs,
                               QuotientKind kind, bool keep_quotients = false) {
  std::vector<double> q(pairs.size(), -1.0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    if (auto v = quotient(m, pairs[i].first, pairs[i].second, kind)) q[i] = *v;
  });
  Estimate<In> est;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < 0.0) {
      ++est.skipped;
      continue;
    }
    ++est.pairs;
    if (keep_quotients) est.quotients.push_back(q[i]);
    if (!best || q[i] > q[*best]) {
      best = i;
    } else if (q[i] == q[*best]) {
      auto key = [&](std::size_t j) {
        auto v = detail::flatten(pairs[j].first);
        auto w = detail::flatten(pairs[j].second);
        v.insert(v.end(), w.begin(), w.end());
        return v;
      };
      if (key(i) < key(*best)) best = i;
    }
  }
  if (!best) throw Error(ErrorKind::NumericFailure, "every sampled pair is degenerate");
  est.value = q[*best];
  est.witness = pairs[*best];
  return est;
}

template <class In>
Estimate<In> estimate_lipschitz(const SampledMap<In>& m, const PairOptions& opts = {},
                                bool keep_quotients = false) {
  return estimate_quotient(m, sample_pairs(m, opts), QuotientKind::Forward, keep_quotients);
}

template <class In>
Estimate<In> estimate_inverse_lipschitz(const SampledMap<In>& m, const PairOptions& opts = {},
                                        bool keep_quotients = false) {
  return estimate_quotient(m, sample_pairs(m, opts), QuotientKind::Inverse, keep_quotients);
}

/// Constants entering the global collar bounds.
struct ConstantBundle {
  double L = 0.0;        ///< max Lipschitz constant of lambda_i over U_i
  double L_sigma = 0.0;  ///< max Lipschitz constant of the cumulative weights
  double C = 1.0;        ///< max Lipschitz constant of the local collars
  double C_b = 1.0;      ///< max bi-Lipschitz constant of the local collars
  double zeta = 1.0;     ///< interior margin of the pushed bands in the images
  std::uint64_t N = 1;   ///< image-overlap chain bound

  void check() const {
    if (!(L >= 0.0 && L_sigma >= 0.0 && C > 0.0 && C_b > 0.0 && zeta > 0.0) ||
        !std::isfinite(L) || !std::isfinite(L_sigma) || !std::isfinite(C) || !std::isfinite(C_b))
      throw Error(ErrorKind::InvalidArgument, "constant bundle has a nonpositive or infinite entry");
  }
};

/// C (1 + L_S/2)(1 + 2 L_S) max(1 + 2L, 1 + 1/zeta)^N C_b^N.
inline double collar_lipschitz_bound(const ConstantBundle& b) {
  b.check();
  const double n = static_cast<double>(b.N);
  return b.C * (1.0 + b.L_sigma / 2.0) * (1.0 + 2.0 * b.L_sigma) *
         std::pow(std::max(1.0 + 2.0 * b.L, 1.0 + 1.0 / b.zeta), n) * std::pow(b.C_b, n);
}

/// C (1 + L_S/2) C_b^(2N) (1 + C/zeta + L/2)^N (3 + 1/zeta + 3L)^N.
/// The two single-argument maxima of the published formula are evaluated as
/// their arguments.
inline double collar_inverse_lipschitz_bound(const ConstantBundle& b) {
  b.check();
  const double n = static_cast<double>(b.N);
  return b.C * (1.0 + b.L_sigma / 2.0) * std::pow(b.C_b, 2.0 * n) *
         std::pow(1.0 + b.C / b.zeta + b.L / 2.0, n) * std::pow(3.0 + 1.0 / b.zeta + 3.0 * b.L, n);
}

struct ZetaOptions {
  std::size_t base_samples = 200;
  std::size_t height_steps = 8;
  std::size_t directions = 16;
  double floor = 1e-6;
  double resolution = 1e-4;
  std::uint64_t seed = 0;
};

/// Largest zeta (on a bisection grid) such that for every sampled
/// z = c_i(x, s), x in supp(lambda_i), s in [0, 3/4], the probes at radii
/// zeta k/4 (k = 1..4) in `directions` directions that lie in X are in W_i.
inline double estimate_zeta(const GlobalCollar& gc, const ZetaOptions& opts = {}) {
  const auto& dom = gc.domain();
  const auto base = dom.sample_base(opts.base_samples, opts.seed);
  std::vector<std::pair<std::size_t, Point>> centers;
  for (const auto& x : base) {
    const auto w = gc.weights(x);
    for (std::size_t i = 1; i <= gc.size(); ++i) {
      if (!(w[i - 1] > 0.0)) continue;
      for (std::size_t k = 0; k <= opts.height_steps; ++k) {
        const double s = 0.75 * static_cast<double>(k) / static_cast<double>(opts.height_steps);
        Point z = gc.collar(i).forward(x, s);
        if (!gc.collar(i).in_image(z))
          throw Error(ErrorKind::Inconsistent,
                      "sampled point of a pushed band lies outside the collar image", {z.vec()});
        centers.emplace_back(i, std::move(z));
      }
    }
  }
  if (centers.empty()) throw Error(ErrorKind::DegenerateRegion, "no weight is positive on samples");
  const std::size_t dim = dom.dim;
  std::vector<Point> dirs;
  if (dim == 1) {
    dirs = {Point{1.0}, Point{-1.0}};
  } else {
    HaltonSequence seq(dim, opts.seed + 29);
    for (std::size_t k = 0; dirs.size() < opts.directions; ++k) {
      Point d = Point::zeros(dim);
      const auto u = seq.at(k);
      if (dim == 2) {
        const double a = 2.0 * 3.14159265358979323846 * static_cast<double>(dirs.size()) /
                         static_cast<double>(opts.directions);
        d = Point{std::cos(a), std::sin(a)};
      } else {
        for (std::size_t j = 0; j < dim; ++j) d[j] = 2.0 * u[j] - 1.0;
        const double nd = norm(d);
        if (nd < 1e-3) continue;
        d = (1.0 / nd) * d;
      }
      dirs.push_back(d);
    }
  }
  auto feasible = [&](double zeta) {
    std::vector<char> ok(centers.size(), 1);
    parallel_for(centers.size(), [&](std::size_t c) {
      const auto& [i, z] = centers[c];
      for (const auto& d : dirs)
        for (int k = 1; k <= 4; ++k) {
          const Point p = z + (zeta * k / 4.0) * d;
          if (!dom.in_ambient(p)) continue;
          if (!gc.collar(i).in_image(p)) {
            ok[c] = 0;
            return;
          }
        }
    });
    return std::all_of(ok.begin(), ok.end(), [](char v) { return v != 0; });
  };
  double hi = dom.bounds_diameter();
  if (feasible(hi)) return hi;
  double lo = 0.0;
  while (hi - lo > opts.resolution * std::max(lo, opts.floor)) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
    if (hi < opts.floor) break;
  }
  if (!(lo >= opts.floor))
    throw Error(ErrorKind::NumericFailure, "image margin vanishes below the resolution floor");
  return lo;
}

struct OverlapOptions {
  std::size_t base_samples = 400;
  std::size_t height_steps = 10;
  std::uint64_t seed = 0;
};

/// Pairwise image intersection on samples: some sampled point of one image
/// lies in the other.
inline std::vector<std::vector<bool>> image_overlaps(const std::vector<LocalCollar>& collars,
                                                     const OverlapOptions& opts = {}) {
  const std::size_t m = collars.size();
  std::vector<std::vector<Point>> images(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& x : collars[i].base.sample(opts.base_samples, opts.seed))
      for (std::size_t k = 0; k <= opts.height_steps; ++k)
        images[i].push_back(collars[i].forward(
            x, static_cast<double>(k) / static_cast<double>(opts.height_steps)));
  std::vector<std::vector<bool>> meet(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i) {
    meet[i][i] = true;
    for (std::size_t j = 0; j < i; ++j) {
      bool hit = false;
      for (const auto& p : images[i])
        if (collars[j].in_image(p)) { hit = true; break; }
      if (!hit)
        for (const auto& p : images[j])
          if (collars[i].in_image(p)) { hit = true; break; }
      meet[i][j] = meet[j][i] = hit;
    }
  }
  return meet;
}

/// max over i of #{j <= i : W_i and W_j meet on samples}.
inline std::uint64_t overlap_chain_count(const std::vector<LocalCollar>& collars,
                                         const OverlapOptions& opts = {}) {
  const auto meet = image_overlaps(collars, opts);
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < collars.size(); ++i) {
    std::uint64_t k = 0;
    for (std::size_t j = 0; j <= i; ++j) k += meet[i][j] ? 1 : 0;
    n = std::max(n, k);
  }
  return n;
}

}  // namespace collar_forge
