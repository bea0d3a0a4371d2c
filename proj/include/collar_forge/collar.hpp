#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/cover.hpp"
#include "collar_forge/error.hpp"
#include "collar_forge/metric.hpp"
#include "collar_forge/point.hpp"
#include "collar_forge/sampling.hpp"

namespace collar_forge {

using ChartFn = std::function<Point(const Point&, double)>;
/// Inverse on the image: nullopt when the point is not in the image.
using LocateFn = std::function<std::optional<CollarPoint>(const Point&)>;

struct CollarConstants {
  std::optional<double> lipschitz;
  std::optional<double> inverse_lipschitz;
  std::optional<double> bi_lipschitz;
};

/// A local collar c : U x [0,1] -> X over the closed base U in B.
struct LocalCollar {
  std::string name;
  BaseSet base;
  ChartFn forward;
  LocateFn locate;
  /// False when `locate` is the numeric fallback; reports flag such collars.
  bool exact_inverse = true;
  CollarConstants declared;

  Point operator()(const Point& x, double t) const { return forward(x, t); }
  Point operator()(const CollarPoint& p) const { return forward(p.base, p.height); }

  bool has_inverse() const noexcept { return static_cast<bool>(locate); }

  bool in_image(const Point& y) const {
    if (!locate) throw Error(ErrorKind::InvalidArgument, "collar '" + name + "' has no inverse");
    return locate(y).has_value();
  }

  CollarPoint inverse(const Point& y) const {
    if (!locate) throw Error(ErrorKind::InvalidArgument, "collar '" + name + "' has no inverse");
    auto r = locate(y);
    if (!r) throw Error(ErrorKind::OutsideImage, "point is not in the image of '" + name + "'", {y.vec()});
    return *r;
  }
};

struct NumericInverseOptions {
  std::size_t starts = 64;
  std::size_t keep = 4;
  double accept_residual = 1e-9;
  std::uint64_t seed = 0;
};

/// Numeric inverse by bounded multi-start compass search over
/// (base parameter, height) in [0,1]^(k+1), minimizing |c(x, t) - y|.
/// Points whose best residual exceeds `accept_residual` are classified as
/// outside the image.
inline LocateFn numeric_locate(BaseSet base, ChartFn forward, NumericInverseOptions opts = {}) {
  return [base = std::move(base), forward = std::move(forward),
          opts](const Point& y) -> std::optional<CollarPoint> {
    const std::size_t k = base.param_dim + 1;
    auto residual = [&](const std::vector<double>& v) {
      const std::span<const double> u(v.data(), base.param_dim);
      const Point x = base.at(u);
      return euclidean_distance(forward(x, v.back()), y);
    };
    HaltonSequence seq(k, opts.seed);
    std::vector<std::pair<double, std::vector<double>>> seeds;
    for (std::size_t s = 0; s < opts.starts; ++s) {
      auto v = seq.at(s);
      seeds.emplace_back(residual(v), v);
    }
    std::sort(seeds.begin(), seeds.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double best_r = std::numeric_limits<double>::infinity();
    std::vector<double> best;
    for (std::size_t s = 0; s < std::min(opts.keep, seeds.size()); ++s) {
      auto [r, v] = seeds[s];
      for (double h = 0.125; h > 1e-15;) {
        bool improved = false;
        for (std::size_t d = 0; d < k; ++d) {
          for (double dir : {1.0, -1.0}) {
            auto w = v;
            w[d] = std::clamp(w[d] + dir * h, 0.0, 1.0);
            const double rw = residual(w);
            if (rw < r) {
              r = rw;
              v = std::move(w);
              improved = true;
            }
          }
        }
        if (!improved) h *= 0.5;
      }
      if (r < best_r) {
        best_r = r;
        best = v;
      }
    }
    if (!(best_r <= opts.accept_residual)) return std::nullopt;
    const Point x = base.at(std::span<const double>(best.data(), base.param_dim));
    if (!base.contains(x)) return std::nullopt;
    return CollarPoint{x, best.back()};
  };
}

struct CollarValidationOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double base_identity_tol = 1e-12;
  double roundtrip_tol = 1e-10;
};

/// Checks c(x,0) = x, inverse(c(p)) = p, and in_image(c(p)) on samples, and
/// bL = L * iL when all three constants are declared.
inline void validate_local_collar(const LocalCollar& c, const CollarValidationOptions& opts = {}) {
  HaltonSequence heights(1, opts.seed + 17);
  const auto params = c.base.sample_params(opts.samples, opts.seed);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Point x = c.base.at(params[i]);
    const Point x0 = c.forward(x, 0.0);
    if (euclidean_distance(x0, x) > opts.base_identity_tol)
      throw ValidationError("local collar base identity", c.name + ": c(x,0) != x", {x.vec(), x0.vec()});
    if (!c.has_inverse()) continue;
    const double t = heights.at(i)[0];
    const Point y = c.forward(x, t);
    const auto back = c.locate(y);
    if (!back)
      throw ValidationError("local collar image predicate", c.name + ": c(x,t) not in image",
                            {x.vec(), {t}});
    const double err = euclidean_distance(back->base, x) + std::abs(back->height - t);
    if (err > opts.roundtrip_tol)
      throw ValidationError("local collar inverse", c.name + ": inverse(c(x,t)) != (x,t), error " +
                                                        std::to_string(err),
                            {x.vec(), {t}});
  }
  const auto& d = c.declared;
  if (d.lipschitz && d.inverse_lipschitz && d.bi_lipschitz) {
    const double prod = *d.lipschitz * *d.inverse_lipschitz;
    if (std::abs(prod - *d.bi_lipschitz) > 1e-12 * std::max(1.0, prod))
      throw ValidationError("declared constants", c.name + ": bL != L * iL");
  }
}

/// Height reparametrization that opens a band of height lambda/2 at the base:
/// [0, 3/4) is mapped affinely onto [lambda/2, 3/4), and [3/4, 1] is fixed.
inline double xi_transform(double lambda, double t) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "weight must lie in [0,1]");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::InvalidArgument, "height must lie in [0,1]");
  if (t >= 0.75) return t;
  return lambda / 2.0 + (0.75 - lambda / 2.0) * (t / 0.75);
}

/// Residual allowed between c(c^-1(y)) and y before a push is rejected.
inline constexpr double kPushResidualTol = 1e-9;

/// The ambient self-embedding g = c o Xi o c^-1 on the image of c, identity
/// elsewhere. `lambda` is the collar's weight, evaluated at the base point.
inline Point push_map(const LocalCollar& c, const std::function<double(const Point&)>& lambda,
                      const Point& y) {
  const auto loc = c.locate(y);
  if (!loc) return y;
  const Point back = c.forward(loc->base, loc->height);
  const double residual = euclidean_distance(back, y);
  if (residual > kPushResidualTol)
    throw Error(ErrorKind::NumericFailure,
                "inverse of '" + c.name + "' did not converge, residual " + std::to_string(residual),
                {y.vec()});
  const double s = std::clamp(loc->height, 0.0, 1.0);
  const double lam = std::clamp(lambda(loc->base), 0.0, 1.0);
  return c.forward(loc->base, xi_transform(lam, s));
}

struct GlobalCollarOptions {
  std::size_t samples = 1000;
  std::size_t injectivity_samples = 10000;
  std::uint64_t seed = 0;
  double base_identity_tol = 1e-10;
  double continuity_tol = 1e-9;
  bool validate_local = true;
};

/// The global collar h : B x [0,1] -> X assembled from ordered local collars
/// c_1..c_m and a partition of unity over the same cover.
///
/// On the region lambda_S,j-1(x) < t <= lambda_S,j(x) (lambda_S the cumulative
/// weights) the collar is h(x,t) = G_{j-1}(c_j(x, (t - lambda_S,j-1(x))/2)),
/// where G_k = g_1 o ... o g_k composes the push maps. Region and collar
/// indices in this interface are 1-based; region 0 is the base slice t = 0.
class GlobalCollar {
 public:
  static constexpr double kRegionTol = 1e-12;
  static constexpr double kHeightTol = 1e-12;
  static constexpr double kDispatchTol = 1e-8;

  GlobalCollar(std::vector<LocalCollar> collars, PartitionOfUnity pou, MetricDomain dom)
      : collars_(std::move(collars)), pou_(std::move(pou)), dom_(std::move(dom)) {
    if (collars_.size() != pou_.size())
      throw Error(ErrorKind::InvalidArgument,
                  "collar count " + std::to_string(collars_.size()) +
                      " differs from partition size " + std::to_string(pou_.size()));
    for (const auto& c : collars_)
      if (!c.has_inverse())
        throw Error(ErrorKind::InvalidArgument, "collar '" + c.name + "' needs an inverse");
  }

  std::size_t size() const noexcept { return collars_.size(); }
  const std::vector<LocalCollar>& collars() const noexcept { return collars_; }
  const LocalCollar& collar(std::size_t i) const { return collars_.at(i - 1); }
  const PartitionOfUnity& pou() const noexcept { return pou_; }
  const MetricDomain& domain() const noexcept { return dom_; }

  std::vector<double> weights(const Point& x) const { return pou_.weights(x); }

  /// lambda_S,0..lambda_S,m at x; entry 0 is 0.
  std::vector<double> cumulative_weights(const Point& x) const {
    return cumulative(pou_.weights(x));
  }

  /// i(x) = max{i : lambda_i(x) > 0}.
  std::size_t locality_index(const Point& x) const {
    const auto w = pou_.weights(x);
    for (std::size_t i = w.size(); i > 0; --i)
      if (w[i - 1] > 0.0) return i;
    return 0;
  }

  /// g_i(y).
  Point push(std::size_t i, const Point& y) const {
    const auto& c = collars_.at(i - 1);
    return push_map(c, [&](const Point& x) { return pou_.weights(x)[i - 1]; }, y);
  }

  /// G_k(y) = g_1(g_2(...g_k(y))).
  Point push_composite(std::size_t k, Point y) const {
    for (std::size_t i = k; i >= 1; --i) y = push(i, y);
    return y;
  }

  /// Smallest j with lambda_j(x) > 0 and t <= lambda_S,j(x) + 1e-12; 0 when t = 0.
  std::size_t region_index(const Point& x, double t) const {
    check_height(t);
    if (t <= 0.0) return 0;
    const auto w = pou_.weights(x);
    return region_from(w, cumulative(w), t);
  }

  /// The region-j formula evaluated at (x, t), whether or not (x, t) lies in
  /// region j. Used for dispatch consistency checks.
  Point evaluate_in_region(const Point& x, double t, std::size_t j) const {
    const auto w = pou_.weights(x);
    return region_formula(x, t, j, cumulative(w));
  }

  /// h(x, t).
  Point evaluate(const Point& x, double t) const {
    if (!dom_.in_base(x)) throw Error(ErrorKind::OutsideBase, "point is not in B", {x.vec()});
    check_height(t);
    t = std::clamp(t, 0.0, 1.0);
    if (t == 0.0) return x;
    const auto w = pou_.weights(x);
    const auto cum = cumulative(w);
    const std::size_t j = region_from(w, cum, t);
    Point y = region_formula(x, t, j, cum);
    if (std::abs(t - cum[j]) <= kRegionTol) {
      for (std::size_t k = j + 1; k <= w.size(); ++k) {
        if (w[k - 1] <= 0.0) continue;
        const Point alt = region_formula(x, t, k, cum);
        const double gap = euclidean_distance(alt, y);
        if (gap > kDispatchTol)
          throw Error(ErrorKind::Inconsistent,
                      "regions " + std::to_string(j) + " and " + std::to_string(k) +
                          " disagree by " + std::to_string(gap) + " at a boundary",
                      {x.vec(), {t}});
        break;
      }
    }
    return y;
  }

  Point operator()(const Point& x, double t) const { return evaluate(x, t); }
  Point operator()(const CollarPoint& p) const { return evaluate(p.base, p.height); }

  /// The partial map h_k on {t <= lambda_S,k(x)}, built from c_1..c_k only.
  Point evaluate_partial(std::size_t k, const Point& x, double t) const {
    check_height(t);
    if (t <= 0.0) return x;
    const auto w = pou_.weights(x);
    const auto cum = cumulative(w);
    if (t > cum[k] + kRegionTol)
      throw Error(ErrorKind::InvalidArgument, "height above the k-th cumulative weight");
    const std::vector<double> head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
    return region_formula(x, t, region_from(head, cum, t), cum);
  }

  /// Forward-only view over B x [0,1], e.g. for gluing into a bicollar.
  LocalCollar as_local_collar(std::string name = "h") const {
    LocalCollar out;
    out.name = std::move(name);
    out.base = dom_.base;
    out.forward = [self = *this](const Point& x, double t) { return self.evaluate(x, t); };
    return out;
  }

 private:
  static std::vector<double> cumulative(const std::vector<double>& w) {
    std::vector<double> cum(w.size() + 1, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) cum[i + 1] = cum[i] + w[i];
    return cum;
  }

  static void check_height(double t) {
    if (!(t >= -kHeightTol && t <= 1.0 + kHeightTol))
      throw Error(ErrorKind::InvalidArgument, "height must lie in [0,1]", {{t}});
  }

  // Lowest-index tie-break at graph boundaries.
  static std::size_t region_from(const std::vector<double>& w, const std::vector<double>& cum,
                                 double t) {
    std::size_t last_active = 0;
    for (std::size_t j = 1; j <= w.size(); ++j) {
      if (w[j - 1] <= 0.0) continue;
      last_active = j;
      if (t <= cum[j] + kRegionTol) return j;
    }
    return last_active;
  }

  Point region_formula(const Point& x, double t, std::size_t j,
                       const std::vector<double>& cum) const {
    if (j == 0) return x;
    const double s = std::clamp((t - cum[j - 1]) / 2.0, 0.0, 1.0);
    return push_composite(j - 1, collars_[j - 1].forward(x, s));
  }

  std::vector<LocalCollar> collars_;
  PartitionOfUnity pou_;
  MetricDomain dom_;
};

namespace detail {

inline void check_injective(const GlobalCollar& gc, const GlobalCollarOptions& opts) {
  const auto& dom = gc.domain();
  const auto base = dom.sample_base(opts.injectivity_samples, opts.seed + 101);
  HaltonSequence heights(1, opts.seed + 103);
  struct Entry {
    Point image;
    CollarPoint input;
  };
  std::vector<Entry> entries;
  entries.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double t = heights.at(i)[0];
    entries.push_back({gc.evaluate(base[i], t), {base[i], t}});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.image[0] < b.image[0]; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t k = i + 1; k < entries.size(); ++k) {
      if (entries[k].image[0] - entries[i].image[0] > 1e-12) break;
      if (euclidean_distance(entries[i].image, entries[k].image) > 1e-12) continue;
      if (product_distance(entries[i].input, entries[k].input, dom) > 1e-10)
        throw ValidationError("injectivity", "distinct inputs share an image",
                              {entries[i].input.base.vec(), {entries[i].input.height},
                               entries[k].input.base.vec(), {entries[k].input.height}});
    }
  }
}

}  // namespace detail

/// Builds the global collar and validates it on samples: each local collar's
/// invariants, support alignment (lambda_i > 0 only on the base of c_i), base
/// identity, continuity across region boundaries, and injectivity.
inline GlobalCollar build_global_collar(std::vector<LocalCollar> collars, PartitionOfUnity pou,
                                        const MetricDomain& dom,
                                        const GlobalCollarOptions& opts = {}) {
  if (opts.validate_local)
    for (const auto& c : collars) validate_local_collar(c, {opts.samples, opts.seed});
  GlobalCollar gc(std::move(collars), std::move(pou), dom);
  const auto pts = dom.sample_base(opts.samples, opts.seed);
  for (const auto& x : pts) {
    const auto w = gc.weights(x);
    for (std::size_t i = 1; i <= gc.size(); ++i)
      if (w[i - 1] > 0.0 && !gc.collar(i).base.contains(x))
        throw ValidationError("support alignment",
                              "weight " + std::to_string(i) + " is positive off its collar base",
                              {x.vec()});
    const Point h0 = gc.evaluate(x, 0.0);
    if (euclidean_distance(h0, x) > opts.base_identity_tol)
      throw ValidationError("base identity", "h(x,0) != x", {x.vec()});
    const auto cum = gc.cumulative_weights(x);
    std::size_t prev = 0;
    for (std::size_t j = 1; j <= gc.size(); ++j) {
      if (w[j - 1] <= 0.0) continue;
      if (prev > 0) {
        const double t = cum[prev];
        const Point a = gc.evaluate_in_region(x, t, prev);
        const Point b = gc.evaluate_in_region(x, t, j);
        if (euclidean_distance(a, b) > opts.continuity_tol)
          throw ValidationError("region continuity",
                                "regions " + std::to_string(prev) + " and " + std::to_string(j) +
                                    " disagree on their common boundary",
                                {x.vec(), {t}});
      }
      prev = j;
    }
  }
  detail::check_injective(gc, opts);
  return gc;
}

}  // namespace collar_forge
