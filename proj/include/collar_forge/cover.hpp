#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/error.hpp"
#include "collar_forge/metric.hpp"
#include "collar_forge/region.hpp"

namespace collar_forge {

/// Finite cover of B by relatively open sets U_a = interior(R_a) n B, where the
/// R_a are ambient regions.
struct Cover {
  std::vector<std::string> labels;
  std::vector<SetDescriptor> members;

  std::size_t size() const noexcept { return members.size(); }

  /// dist(x, X \ R_a). A point with margin m has B(x, m) n B inside U_a.
  double margin(std::size_t a, const Point& x) const { return interior_margin(x, members[a]); }
  bool contains(std::size_t a, const Point& x) const { return margin(a, x) > 0.0; }

  /// Membership in the closure of U_a, for points already known to lie in B.
  bool closure_contains(std::size_t a, const Point& x, double tol = 1e-12) const {
    return dist_to_set(x, members[a]) <= tol;
  }

  std::size_t count_containing(const Point& x) const {
    std::size_t k = 0;
    for (std::size_t a = 0; a < size(); ++a) k += contains(a, x) ? 1 : 0;
    return k;
  }

  /// Reorders the members; `order[k]` is the old index placed at position k.
  Cover permuted(std::span<const std::size_t> order) const {
    Cover out;
    for (std::size_t k : order) {
      out.labels.push_back(k < labels.size() ? labels[k] : std::to_string(k));
      out.members.push_back(members.at(k));
    }
    return out;
  }
};

/// Largest delta on the grid {delta_max * 2^-k} certified on samples of B,
/// where delta_max is the diameter of the domain's bounding box.
///
/// Each sample x contributes max_a dist(x, X \ R_a); this certifies that the
/// relative ball B(x, delta) n B lies inside one member, so the result is a
/// lower bound of the Lebesgue number on the sampled points.
inline double estimate_lebesgue(const Cover& cover, const MetricDomain& dom,
                                std::size_t resolution, std::uint64_t seed) {
  if (cover.size() == 0) throw Error(ErrorKind::NotACover, "cover has no members");
  const double delta_max = dom.bounds_diameter();
  if (!(delta_max > 0.0) || !std::isfinite(delta_max))
    throw Error(ErrorKind::InvalidArgument, "domain bounds must be bounded and non-degenerate");
  double certified = kInfiniteDistance;
  for (const auto& x : dom.sample_base(resolution, seed)) {
    double best = 0.0;
    for (std::size_t a = 0; a < cover.size(); ++a) best = std::max(best, cover.margin(a, x));
    if (!(best > 0.0))
      throw Error(ErrorKind::NotACover, "sampled base point lies in no member", {x.vec()});
    certified = std::min(certified, best);
  }
  double delta = delta_max;
  while (delta > certified) delta *= 0.5;
  return delta;
}

/// Maximum number of members containing a sampled base point.
inline std::size_t compute_order(const Cover& cover, const MetricDomain& dom, std::size_t samples,
                                 std::uint64_t seed) {
  std::size_t order = 0;
  for (const auto& x : dom.sample_base(samples, seed)) {
    const std::size_t k = cover.count_containing(x);
    if (k == 0) throw Error(ErrorKind::NotACover, "sampled base point lies in no member", {x.vec()});
    order = std::max(order, k);
  }
  return order;
}

/// Lipschitz partition of unity subordinate to a cover with Lebesgue number
/// delta and order N.
///
/// The shrunken sets are V_a = {x : dist(x, X \ R_a) > delta - delta0} and the
/// bumps f_a = min(1, dist(x, X \ V_a)); in R^n the latter equals
/// min(1, max(0, dist(x, X \ R_a) - (delta - delta0))), which is what is
/// evaluated. Weights are lambda_a = f_a / sum_b f_b.
class PartitionOfUnity {
 public:
  PartitionOfUnity(Cover cover, double delta, double delta0, std::size_t order)
      : cover_(std::move(cover)), delta_(delta), delta0_(delta0), order_(order) {}

  const Cover& cover() const noexcept { return cover_; }
  std::size_t size() const noexcept { return cover_.size(); }
  double delta() const noexcept { return delta_; }
  double delta0() const noexcept { return delta0_; }
  std::size_t order() const noexcept { return order_; }

  double bump(std::size_t a, const Point& x) const {
    const double m = cover_.margin(a, x) - (delta_ - delta0_);
    return std::min(1.0, std::max(0.0, m));
  }

  bool in_shrunken(std::size_t a, const Point& x) const { return bump(a, x) > 0.0; }

  std::vector<double> bumps(const Point& x) const {
    std::vector<double> f(size());
    for (std::size_t a = 0; a < size(); ++a) f[a] = bump(a, x);
    return f;
  }

  /// All weights at x. Throws when no shrunken set contains x.
  std::vector<double> weights(const Point& x) const {
    auto f = bumps(x);
    double total = 0.0;
    for (double v : f) total += v;
    if (!(total > 0.0)) {
      const bool covered = cover_.count_containing(x) > 0;
      throw Error(covered ? ErrorKind::ShrunkenCoverFailure : ErrorKind::NotACover,
                  "no bump is positive at the point", {x.vec()});
    }
    for (double& v : f) v /= total;
    return f;
  }

  double weight(std::size_t a, const Point& x) const { return weights(x)[a]; }

  /// Sum of the weights whose indices are listed in `subset`.
  double partial_sum(std::span<const std::size_t> subset, const Point& x) const {
    const auto w = weights(x);
    double s = 0.0;
    for (std::size_t a : subset) s += w.at(a);
    return s;
  }

  /// delta0 as seen by the bounds: the min(1, .) clamp on the bumps means the
  /// bump sum is only guaranteed to reach min(1, delta0).
  double effective_delta0() const noexcept { return std::min(delta0_, 1.0); }

  /// Bound on the Lipschitz constant of lambda_a over U_a: (N-1)/delta0.
  double bound_on_member() const noexcept {
    return static_cast<double>(order_ - 1) / effective_delta0();
  }
  /// Bound on the global Lipschitz constant of any lambda_a: N/delta0.
  double bound_global() const noexcept { return static_cast<double>(order_) / effective_delta0(); }
  /// Bound for arbitrary partial sums of the weights: N/delta0.
  double bound_partial_sum() const noexcept { return bound_global(); }

 private:
  Cover cover_;
  double delta_;
  double delta0_;
  std::size_t order_;
};

struct PouOptions {
  std::size_t samples = 4096;
  std::uint64_t seed = 0;
};

/// Builds the partition of unity and checks on samples that the shrunken sets
/// still cover B. `delta` must be a Lebesgue number of the cover; this is the
/// caller's responsibility.
inline PartitionOfUnity build_pou(const Cover& cover, double delta, double delta0,
                                  const MetricDomain& dom, const PouOptions& opts = {}) {
  if (cover.size() == 0) throw Error(ErrorKind::NotACover, "cover has no members");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  if (!(delta0 > 0.0 && delta0 < delta))
    throw Error(ErrorKind::InvalidArgument, "delta0 must lie in (0, delta)");
  const std::size_t order = compute_order(cover, dom, opts.samples, opts.seed);
  PartitionOfUnity pou(cover, delta, delta0, order);
  for (const auto& x : dom.sample_base(opts.samples, opts.seed)) (void)pou.weights(x);
  return pou;
}

struct SeparatedNet {
  double tau = 0.0;
  std::vector<Point> points;
  /// Largest distance from a candidate to its nearest net point (< tau).
  double covering_radius = 0.0;
  std::size_t candidates = 0;
};

/// Greedy tau-separated net over an ordered candidate list: a candidate joins
/// the net when it is at distance >= tau from every net point so far.
inline SeparatedNet greedy_net(std::span<const Point> candidates, double tau,
                               const DistanceFn& dist) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  SeparatedNet net;
  net.tau = tau;
  net.candidates = candidates.size();
  for (const auto& c : candidates) {
    double nearest = kInfiniteDistance;
    for (const auto& p : net.points) {
      nearest = std::min(nearest, dist(c, p));
      if (nearest < tau) break;
    }
    if (nearest >= tau) {
      net.points.push_back(c);
    }
  }
  for (const auto& c : candidates) {
    double nearest = kInfiniteDistance;
    for (const auto& p : net.points) nearest = std::min(nearest, dist(c, p));
    net.covering_radius = std::max(net.covering_radius, nearest);
  }
  return net;
}

/// Greedy maximal tau-separated subset of B, built from `candidates`
/// quasi-random base samples in sampler order.
inline SeparatedNet greedy_maximal_net(const MetricDomain& dom, double tau, std::uint64_t seed,
                                       std::size_t candidates = 10000) {
  if (!box_is_bounded(dom.region_bounds))
    throw Error(ErrorKind::InvalidArgument, "greedy net needs bounded region bounds");
  const auto pts = dom.sample_base(candidates, seed);
  return greedy_net(pts, tau, dom.dist);
}

/// Constants for collaring the boundary of a weakly Lipschitz domain in R^n
/// from unit-scale local bicollars with constants bounded by C.
struct NetConstants {
  std::uint64_t n_prime = 0;  ///< overlap bound of the unit balls around the net
  std::uint64_t n_chain = 0;  ///< image-overlap chain bound
  double lambda_lipschitz = 0.0;
  double lambda_sum_lipschitz = 0.0;
  double zeta = 0.0;
};

inline NetConstants net_constants(int n, double C) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (!(C >= 1.0)) throw Error(ErrorKind::InvalidArgument, "collar constant must be >= 1");
  NetConstants k;
  k.n_prime = static_cast<std::uint64_t>(std::llround(std::pow(5.0, n)));
  k.n_chain = static_cast<std::uint64_t>(std::floor(std::pow(8.0 * C + 9.0, n) + 1e-9));
  k.lambda_lipschitz = 2.0 * static_cast<double>(k.n_prime - 1);
  k.lambda_sum_lipschitz = 2.0 * static_cast<double>(k.n_prime);
  k.zeta = 0.25 / C;
  return k;
}

}  // namespace collar_forge
