#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/collar.hpp"
#include "collar_forge/error.hpp"
#include "collar_forge/lipschitz.hpp"
#include "collar_forge/metric.hpp"
#include "collar_forge/point.hpp"
#include "collar_forge/sampling.hpp"

namespace collar_forge {

enum class Side { Minus = -1, Base = 0, Plus = 1 };
using SideFn = std::function<Side(const Point&)>;

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Minus: return "minus";
    case Side::Base: return "base";
    case Side::Plus: return "plus";
  }
  return "unknown";
}

/// Two-sided collar c : U x [-limit, limit] -> X with c(x,0) = x.
struct Bicollar {
  std::string name;
  BaseSet base;
  ChartFn forward;
  SideFn side;
  double limit = 1.0;

  Point operator()(const Point& x, double t) const { return forward(x, t); }

  /// c+ as a collar on [0,1]: (x,t) -> c(x, t limit).
  LocalCollar plus() const {
    LocalCollar out;
    out.name = name + "+";
    out.base = base;
    out.forward = [f = forward, l = limit](const Point& x, double t) { return f(x, t * l); };
    return out;
  }
  /// c- as a collar on [0,1]: (x,t) -> c(x, -t limit).
  LocalCollar minus() const {
    LocalCollar out;
    out.name = name + "-";
    out.base = base;
    out.forward = [f = forward, l = limit](const Point& x, double t) { return f(x, -t * l); };
    return out;
  }
};

/// The bicollar as a map on base x [-limit, limit] with the product metric.
inline SampledMap<CollarPoint> bicollar_map(const Bicollar& c) {
  return collar_map(c.base, c.forward, -c.limit, c.limit);
}

struct OrientOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

namespace detail {

inline int fiber_sign(const Bicollar& raw, const SideFn& side, const Point& x) {
  bool plus = true, minus = true;
  for (double f : {0.25, 0.5, 1.0}) {
    const Side s = side(raw.forward(x, f * raw.limit));
    plus = plus && s == Side::Plus;
    minus = minus && s == Side::Minus;
  }
  if (plus) return 1;
  if (minus) return -1;
  throw Error(ErrorKind::InvalidArgument, "not two-sided at x", {x.vec()});
}

}  // namespace detail

/// Flips the height on the base points whose positive fiber lies on the
/// minus side, so positive heights map to the plus side everywhere.
inline Bicollar orient_bicollar(const Bicollar& raw, SideFn side, const OrientOptions& opts = {}) {
  for (const auto& x : raw.base.sample(opts.samples, opts.seed)) (void)detail::fiber_sign(raw, side, x);
  Bicollar out = raw;
  out.side = side;
  out.forward = [raw, side](const Point& x, double t) {
    if (t == 0.0) return raw.forward(x, 0.0);
    return raw.forward(x, detail::fiber_sign(raw, side, x) * t);
  };
  return out;
}

struct GlueOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double base_identity_tol = 1e-10;
};

/// c(x,t) = c+(x,t) for t >= 0 and c-(x,-t) for t < 0.
inline Bicollar glue_bicollar(const LocalCollar& c_plus, const LocalCollar& c_minus,
                              SideFn side = {}, const GlueOptions& opts = {}) {
  for (const auto& x : c_plus.base.sample(opts.samples, opts.seed)) {
    if (!c_minus.base.contains(x))
      throw Error(ErrorKind::InvalidArgument, "base mismatch between the two sides", {x.vec()});
    if (euclidean_distance(c_plus.forward(x, 0.0), x) > opts.base_identity_tol ||
        euclidean_distance(c_minus.forward(x, 0.0), x) > opts.base_identity_tol)
      throw ValidationError("base identity", "a side does not fix the base", {x.vec()});
  }
  for (const auto& x : c_minus.base.sample(opts.samples, opts.seed))
    if (!c_plus.base.contains(x))
      throw Error(ErrorKind::InvalidArgument, "base mismatch between the two sides", {x.vec()});
  Bicollar out;
  out.name = c_plus.name + "|" + c_minus.name;
  out.base = c_plus.base;
  out.side = std::move(side);
  out.forward = [p = c_plus.forward, m = c_minus.forward](const Point& x, double t) {
    return t >= 0.0 ? p(x, t) : m(x, -t);
  };
  return out;
}

struct CrossPairOptions {
  std::size_t pairs = 1000;
  std::uint64_t seed = 0;
  std::size_t max_redraws = 100;
};

/// Pairs ((x,s),(y,t)) with s < 0 < t, stratified by |s| + |t| over the
/// decades [1e-4, 1] times the height limit. Half of the pairs have y drawn
/// near x at the same scale.
inline std::vector<InputPair<CollarPoint>> sample_cross_pairs(const Bicollar& c,
                                                              const CrossPairOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::vector<InputPair<CollarPoint>> out;
  const std::size_t k = c.base.param_dim;
  for (std::size_t i = 0; i < opts.pairs; ++i) {
    const double decade = static_cast<double>(i % 4);
    for (std::size_t attempt = 0; attempt < opts.max_redraws; ++attempt) {
      const double sigma = c.limit * std::pow(10.0, -4.0 + decade + unit_double(rng));
      const double w = 0.05 + 0.9 * unit_double(rng);
      std::vector<double> u(k), v(k);
      for (auto& e : u) e = unit_double(rng);
      const bool near = (i / 4) % 2 == 1;
      for (std::size_t d = 0; d < k; ++d)
        v[d] = near ? std::clamp(u[d] + sigma * (2.0 * unit_double(rng) - 1.0), 0.0, 1.0)
                    : unit_double(rng);
      Point x = c.base.at(u);
      Point y = c.base.at(v);
      if (!c.base.contains(x) || !c.base.contains(y)) continue;
      const double s = -std::min(c.limit, sigma * w);
      const double t = std::min(c.limit, sigma * (1.0 - w));
      out.push_back({{std::move(x), s}, {std::move(y), t}});
      break;
    }
  }
  return out;
}

namespace detail {

inline bool is_cross(const InputPair<CollarPoint>& p) {
  return (p.first.height < 0.0 && p.second.height > 0.0) ||
         (p.first.height > 0.0 && p.second.height < 0.0);
}

/// Orders a cross pair as (minus point, plus point).
inline InputPair<CollarPoint> minus_first(const InputPair<CollarPoint>& p) {
  return p.first.height < 0.0 ? p : InputPair<CollarPoint>{p.second, p.first};
}

inline void split_same_side(const std::vector<InputPair<CollarPoint>>& pairs,
                            std::vector<InputPair<CollarPoint>>& plus,
                            std::vector<InputPair<CollarPoint>>& minus) {
  for (const auto& p : pairs) {
    if (is_cross(p)) continue;
    const bool any_neg = p.first.height < 0.0 || p.second.height < 0.0;
    (any_neg ? minus : plus).push_back(p);
  }
}

}  // namespace detail

struct PastingReport {
  Estimate<CollarPoint> glued;
  Estimate<CollarPoint> plus;
  Estimate<CollarPoint> minus;
  std::size_t cross_pairs = 0;

  double one_sided_max() const { return std::max(plus.value, minus.value); }
  bool holds(double slack = 1e-9) const { return glued.value <= one_sided_max() + slack; }
};

/// Sampled Lipschitz constants of the glued map and of its two sides.
///
/// Same-side pairs go to their side. For each cross pair (x,s),(y,t) with
/// s < 0 < t the side samples also receive (x,s)-(x,0) for c-, and
/// (y,t)-(y,0) and (x,0)-(y,0) for c+, the pieces of the triangle
/// inequality through c(x,0) and c(y,0).
inline PastingReport pasting_estimate(const Bicollar& c, const PairOptions& opts,
                                      const CrossPairOptions& cross) {
  const auto m = bicollar_map(c);
  auto pairs = sample_pairs(m, opts);
  const auto crosses = sample_cross_pairs(c, cross);
  pairs.insert(pairs.end(), crosses.begin(), crosses.end());
  std::vector<InputPair<CollarPoint>> plus, minus;
  detail::split_same_side(pairs, plus, minus);
  std::size_t n_cross = 0;
  for (const auto& p : pairs) {
    if (!detail::is_cross(p)) continue;
    ++n_cross;
    const auto [a, b] = detail::minus_first(p);
    minus.push_back({a, {a.base, 0.0}});
    plus.push_back({b, {b.base, 0.0}});
    plus.push_back({{a.base, 0.0}, {b.base, 0.0}});
  }
  PastingReport r;
  r.glued = estimate_quotient(m, pairs, QuotientKind::Forward);
  r.plus = estimate_quotient(m, plus, QuotientKind::Forward);
  r.minus = estimate_quotient(m, minus, QuotientKind::Forward);
  r.cross_pairs = n_cross;
  return r;
}

enum class EpsilonBinding { Cap, ImageCondition, DistanceCondition };

inline const char* to_string(EpsilonBinding b) {
  switch (b) {
    case EpsilonBinding::Cap: return "cap";
    case EpsilonBinding::ImageCondition: return "L(c) max iL(c_a) eps <= delta";
    case EpsilonBinding::DistanceCondition: return "4 L(c) eps <= delta";
  }
  return "unknown";
}

struct EpsilonChoice {
  double epsilon = 0.0;
  EpsilonBinding binding = EpsilonBinding::Cap;
  double image_limit = 0.0;     ///< delta / (L iL)
  double distance_limit = 0.0;  ///< delta / (4 L)
};

/// Largest eps in (0,1] with L iL eps <= delta and 4 L eps <= delta.
inline EpsilonChoice bicollar_epsilon(double L_c, double iL_alpha_max, double delta) {
  if (!(L_c > 0.0 && iL_alpha_max > 0.0 && delta > 0.0))
    throw Error(ErrorKind::InvalidArgument, "epsilon inputs must be positive");
  EpsilonChoice e;
  e.image_limit = delta / (L_c * iL_alpha_max);
  e.distance_limit = delta / (4.0 * L_c);
  e.epsilon = 1.0;
  if (e.image_limit < e.epsilon) {
    e.epsilon = e.image_limit;
    e.binding = EpsilonBinding::ImageCondition;
  }
  if (e.distance_limit < e.epsilon) {
    e.epsilon = e.distance_limit;
    e.binding = EpsilonBinding::DistanceCondition;
  }
  return e;
}

struct BicollarConstants {
  double L_c = 0.0;
  double iL_minus = 0.0;
  double iL_plus = 0.0;
  /// Inverse and bi-Lipschitz constants of the local bicollars c_a.
  std::vector<double> iL_alpha;
  std::vector<double> bL_alpha;
};

struct RestrictedBicollar {
  Bicollar bicollar;
  EpsilonChoice limits;
  double epsilon = 0.0;
  double delta = 0.0;
  /// 2 (1 + 2 eps/delta) max(iL-, iL+) max_a(1 / bL_a), as published.
  double verbatim_bound = 0.0;
  /// The same with max_a bL_a in place of max_a(1 / bL_a).
  double corrected_bound = 0.0;
  double image_condition = 0.0;     ///< L iL eps
  double distance_condition = 0.0;  ///< 4 L eps
};

/// Restricts c to heights [-eps, eps] and evaluates the inverse Lipschitz
/// bound of the restriction.
inline RestrictedBicollar restrict_bicollar(const Bicollar& c, double epsilon, double delta,
                                            const BicollarConstants& k) {
  if (k.iL_alpha.empty() || k.bL_alpha.empty())
    throw Error(ErrorKind::InvalidArgument, "local bicollar constants are required");
  const double iL_alpha_max = *std::max_element(k.iL_alpha.begin(), k.iL_alpha.end());
  RestrictedBicollar r;
  r.limits = bicollar_epsilon(k.L_c, iL_alpha_max, delta);
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (epsilon > r.limits.epsilon)
    throw Error(ErrorKind::InvalidArgument,
                "epsilon " + std::to_string(epsilon) + " exceeds the admissible " +
                    std::to_string(r.limits.epsilon));
  if (epsilon > c.limit)
    throw Error(ErrorKind::InvalidArgument, "epsilon exceeds the bicollar's height range");
  r.epsilon = epsilon;
  r.delta = delta;
  r.bicollar = c;
  r.bicollar.name = c.name + "|eps";
  r.bicollar.limit = epsilon;
  double inv_max = 0.0, bl_max = 0.0;
  for (double b : k.bL_alpha) {
    if (!(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "bi-Lipschitz constants must be positive");
    inv_max = std::max(inv_max, 1.0 / b);
    bl_max = std::max(bl_max, b);
  }
  const double head = 2.0 * (1.0 + 2.0 * epsilon / delta) * std::max(k.iL_minus, k.iL_plus);
  r.verbatim_bound = head * inv_max;
  r.corrected_bound = head * bl_max;
  r.image_condition = k.L_c * iL_alpha_max * epsilon;
  r.distance_condition = 4.0 * k.L_c * epsilon;
  return r;
}

struct BicollarEstimates {
  BicollarConstants constants;
  Estimate<CollarPoint> glued_lipschitz;
  std::vector<double> lipschitz_alpha;
};

/// Sampled constants entering the restriction: L(c) on all pairs, iL of each
/// side on same-side pairs, and iL, bL of each local bicollar.
inline BicollarEstimates estimate_bicollar_constants(const Bicollar& c,
                                                     const std::vector<Bicollar>& local,
                                                     const PairOptions& opts,
                                                     const CrossPairOptions& cross) {
  auto sampled = [&](const Bicollar& b) {
    auto pairs = sample_pairs(bicollar_map(b), opts);
    const auto crosses = sample_cross_pairs(b, cross);
    pairs.insert(pairs.end(), crosses.begin(), crosses.end());
    return pairs;
  };
  BicollarEstimates e;
  const auto m = bicollar_map(c);
  const auto pairs = sampled(c);
  e.glued_lipschitz = estimate_quotient(m, pairs, QuotientKind::Forward);
  e.constants.L_c = e.glued_lipschitz.value;
  std::vector<InputPair<CollarPoint>> plus, minus;
  detail::split_same_side(pairs, plus, minus);
  e.constants.iL_plus = estimate_quotient(m, plus, QuotientKind::Inverse).value;
  e.constants.iL_minus = estimate_quotient(m, minus, QuotientKind::Inverse).value;
  for (const auto& b : local) {
    const auto mb = bicollar_map(b);
    const auto pb = sampled(b);
    const double L = estimate_quotient(mb, pb, QuotientKind::Forward).value;
    const double iL = estimate_quotient(mb, pb, QuotientKind::Inverse).value;
    e.lipschitz_alpha.push_back(L);
    e.constants.iL_alpha.push_back(iL);
    e.constants.bL_alpha.push_back(L * iL);
  }
  return e;
}

struct MidpointOptions {
  std::size_t witness_pool = 1000;
  PairOptions pairs{};
  CrossPairOptions cross{};
  double coincident_tol = 1e-12;
};

struct MidpointReport {
  double alpha = 1.0;
  std::optional<InputPair<CollarPoint>> alpha_witness;
  std::optional<Point> midpoint;
  std::size_t skipped = 0;
  Estimate<CollarPoint> glued;
  Estimate<CollarPoint> plus;
  Estimate<CollarPoint> minus;

  double induced_bound() const { return alpha * std::max(plus.value, minus.value); }
};

/// Smallest alpha on samples such that every sampled cross pair has a base
/// point z, among the pair's base points and the witness pool, with
/// dist(c(x,s), z) + dist(z, c(y,t)) <= alpha dist(c(x,s), c(y,t)).
///
/// The side samples receive the pairs ((x,s),(z,0)) and ((z,0),(y,t)) for the
/// chosen z, so iL(c) <= alpha max(iL-, iL+) holds on the samples.
inline MidpointReport midpoint_alpha(const Bicollar& c, const MidpointOptions& opts = {}) {
  const auto m = bicollar_map(c);
  const auto pool = c.base.sample(opts.witness_pool, opts.cross.seed + 41);
  auto pairs = sample_pairs(m, opts.pairs);
  const auto crosses = sample_cross_pairs(c, opts.cross);
  pairs.insert(pairs.end(), crosses.begin(), crosses.end());

  struct Best {
    double ratio = -1.0;
    Point z;
  };
  std::vector<Best> best(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    if (!detail::is_cross(pairs[i])) return;
    const auto [p, q] = detail::minus_first(pairs[i]);
    const Point a = c.forward(p.base, p.height);
    const Point b = c.forward(q.base, q.height);
    const double d = euclidean_distance(a, b);
    if (d < opts.coincident_tol) return;
    Best bst{kInfiniteDistance, {}};
    auto consider = [&](const Point& z) {
      const double r = (euclidean_distance(a, z) + euclidean_distance(z, b)) / d;
      if (r < bst.ratio) bst = {r, z};
    };
    consider(p.base);
    consider(q.base);
    for (const auto& z : pool) consider(z);
    best[i] = std::move(bst);
  });

  MidpointReport r;
  std::vector<InputPair<CollarPoint>> glued, plus, minus;
  detail::split_same_side(pairs, plus, minus);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!detail::is_cross(pairs[i])) {
      glued.push_back(pairs[i]);
      continue;
    }
    if (best[i].ratio < 0.0) {
      ++r.skipped;
      continue;
    }
    glued.push_back(pairs[i]);
    const auto [p, q] = detail::minus_first(pairs[i]);
    const Point& z = best[i].z;
    minus.push_back({p, {z, 0.0}});
    plus.push_back({{z, 0.0}, q});
    if (best[i].ratio > r.alpha) {
      r.alpha = best[i].ratio;
      r.alpha_witness = pairs[i];
      r.midpoint = z;
    }
  }
  r.glued = estimate_quotient(m, glued, QuotientKind::Inverse);
  r.plus = estimate_quotient(m, plus, QuotientKind::Inverse);
  r.minus = estimate_quotient(m, minus, QuotientKind::Inverse);
  return r;
}

}  // namespace collar_forge
