#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "collar_forge/collar.hpp"
#include "collar_forge/cover.hpp"
#include "collar_forge/lipschitz.hpp"
#include "collar_forge/point.hpp"

namespace collar_forge {

/// A maximizing input pair with its quotient. Collar inputs are flattened as
/// base coordinates followed by the height.
struct Witness {
  std::vector<double> a;
  std::vector<double> b;
  double quotient = 0.0;
};

inline CollarPoint unflatten_collar_point(const std::vector<double>& v) {
  if (v.size() < 2) throw Error(ErrorKind::DimensionMismatch, "flattened collar point is too short");
  return {Point(std::vector<double>(v.begin(), v.end() - 1)), v.back()};
}

template <class In>
std::optional<Witness> make_witness(const Estimate<In>& e) {
  if (!e.witness) return std::nullopt;
  return Witness{detail::flatten(e.witness->first), detail::flatten(e.witness->second), e.value};
}

struct Verdict {
  std::string check;
  bool pass = false;
  double estimate = 0.0;
  double bound = 0.0;
  std::optional<Witness> witness;
};

struct CollarMeasurement {
  std::string name;
  double lipschitz = 0.0;
  double inverse_lipschitz = 0.0;
  double bi_lipschitz = 0.0;
  CollarConstants declared;
  bool exact_inverse = true;
};

struct QuotientRow {
  std::string map;
  std::string kind;
  double quotient = 0.0;
};

struct LipschitzReport {
  std::vector<std::string> order;
  ConstantBundle bundle;
  std::vector<CollarMeasurement> collars;
  std::size_t cover_order = 0;
  double delta = 0.0;
  double delta0 = 0.0;
  double bound_L = 0.0;
  double bound_iL = 0.0;
  double estimate_L = 0.0;
  double estimate_iL = 0.0;
  std::optional<Witness> witness_L;
  std::optional<Witness> witness_iL;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  std::vector<QuotientRow> quotients;

  bool passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }
  const Verdict* find(const std::string& check) const {
    for (const auto& v : verdicts)
      if (v.check == check) return &v;
    return nullptr;
  }
};

struct VerifyOptions {
  std::size_t pairs = 10000;
  std::size_t collar_pairs = 4000;
  std::size_t weight_pairs = 2000;
  std::uint64_t seed = 0;
  bool keep_quotients = false;
  double slack = 1e-9;
  ZetaOptions zeta{};
  OverlapOptions overlap{};
};

/// Measures the constant bundle of a validated global collar, evaluates both
/// bounds, estimates L(h) and iL(h) on sampled pairs, and checks declared
/// collar constants against their estimates.
inline LipschitzReport verify(const GlobalCollar& gc, const VerifyOptions& opts = {}) {
  LipschitzReport r;
  const auto& dom = gc.domain();
  const auto& pou = gc.pou();
  r.cover_order = pou.order();
  r.delta = pou.delta();
  r.delta0 = pou.delta0();
  for (const auto& c : gc.collars()) r.order.push_back(c.name);

  auto pair_opts = [&](std::size_t n, std::uint64_t salt) {
    PairOptions p;
    p.pairs = n;
    p.seed = opts.seed * 1000003ULL + salt;
    return p;
  };
  auto add = [&](std::string check, double est, double bound, std::optional<Witness> w) {
    r.verdicts.push_back({std::move(check), est <= bound + opts.slack, est, bound, std::move(w)});
  };

  ConstantBundle& b = r.bundle;
  b.C = 0.0;
  b.C_b = 0.0;
  for (std::size_t i = 1; i <= gc.size(); ++i) {
    const auto& c = gc.collar(i);
    const auto m = collar_map(c);
    const auto pairs = sample_pairs(m, pair_opts(opts.collar_pairs, 10 + i));
    const auto L = estimate_quotient(m, pairs, QuotientKind::Forward);
    const auto iL = estimate_quotient(m, pairs, QuotientKind::Inverse);
    CollarMeasurement cm{c.name, L.value, iL.value, L.value * iL.value, c.declared, c.exact_inverse};
    r.collars.push_back(cm);
    b.C = std::max(b.C, L.value);
    b.C_b = std::max(b.C_b, cm.bi_lipschitz);
    if (c.declared.lipschitz)
      add("declared_lipschitz:" + c.name, L.value, *c.declared.lipschitz, make_witness(L));
    if (c.declared.inverse_lipschitz)
      add("declared_inverse_lipschitz:" + c.name, iL.value, *c.declared.inverse_lipschitz,
          make_witness(iL));
    if (!c.exact_inverse)
      r.notes.push_back("collar '" + c.name + "' uses a numeric inverse; its image predicate is unverified");
  }

  std::optional<Witness> w_member, w_sum;
  for (std::size_t i = 0; i < gc.size(); ++i) {
    const BaseSet member =
        dom.base.restricted([&pou, i](const Point& x) { return pou.cover().contains(i, x); });
    const auto m = point_map(member, [&pou, i](const Point& x) { return Point{pou.weights(x)[i]}; },
                             dom.dist);
    const auto e = estimate_lipschitz(m, pair_opts(opts.weight_pairs, 100 + i));
    if (e.value >= b.L) {
      b.L = e.value;
      w_member = make_witness(e);
    }
  }
  for (std::size_t k = 1; k <= gc.size(); ++k) {
    const auto m = point_map(
        dom.base, [&pou, k](const Point& x) {
          const auto w = pou.weights(x);
          double s = 0.0;
          for (std::size_t j = 0; j < k; ++j) s += w[j];
          return Point{s};
        },
        dom.dist);
    const auto e = estimate_lipschitz(m, pair_opts(opts.weight_pairs, 200 + k));
    if (e.value >= b.L_sigma) {
      b.L_sigma = e.value;
      w_sum = make_witness(e);
    }
  }
  add("partition_member_bound", b.L, pou.bound_on_member(), w_member);
  add("partition_sum_bound", b.L_sigma, pou.bound_partial_sum(), w_sum);

  ZetaOptions zo = opts.zeta;
  zo.seed = opts.seed;
  b.zeta = estimate_zeta(gc, zo);
  OverlapOptions oo = opts.overlap;
  oo.seed = opts.seed;
  b.N = overlap_chain_count(gc.collars(), oo);
  add("bundle_consistency", b.C, b.C_b, std::nullopt);

  r.bound_L = collar_lipschitz_bound(b);
  r.bound_iL = collar_inverse_lipschitz_bound(b);

  const auto h = collar_map(dom.base, [&gc](const Point& x, double t) { return gc.evaluate(x, t); },
                            0.0, 1.0, dom.dist);
  const auto pairs = sample_pairs(h, pair_opts(opts.pairs, 1));
  const auto eL = estimate_quotient(h, pairs, QuotientKind::Forward, opts.keep_quotients);
  const auto eiL = estimate_quotient(h, pairs, QuotientKind::Inverse, opts.keep_quotients);
  r.estimate_L = eL.value;
  r.estimate_iL = eiL.value;
  r.witness_L = make_witness(eL);
  r.witness_iL = make_witness(eiL);
  add("lipschitz_bound", eL.value, r.bound_L, r.witness_L);
  add("inverse_lipschitz_bound", eiL.value, r.bound_iL, r.witness_iL);
  if (opts.keep_quotients) {
    for (double q : eL.quotients) r.quotients.push_back({"h", "lipschitz", q});
    for (double q : eiL.quotients) r.quotients.push_back({"h", "inverse_lipschitz", q});
  }

  r.notes.push_back("inverse Lipschitz bound: the two single-argument maxima are evaluated as written");
  r.notes.push_back("N is the global image-overlap count over the cover, which dominates the neighborhood count");
  return r;
}

/// Re-evaluates the quotient of a collar-input witness under `m`.
inline double reevaluate(const SampledMap<CollarPoint>& m, const Witness& w, QuotientKind kind) {
  const auto q = quotient(m, unflatten_collar_point(w.a), unflatten_collar_point(w.b), kind);
  if (!q) throw Error(ErrorKind::InvalidArgument, "witness pair is degenerate");
  return *q;
}

}  // namespace collar_forge
