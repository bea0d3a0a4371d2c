#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <vector>

#include "collar_forge/fixtures.hpp"
#include "collar_forge/lipschitz.hpp"

namespace cf = collar_forge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

cf::BaseSet box_base(double w, double h) {
  cf::BaseSet b;
  b.param_dim = 2;
  b.at = [w, h](std::span<const double> u) { return cf::Point{w * u[0], h * u[1]}; };
  b.contains = [](const cf::Point&) { return true; };
  return b;
}

cf::BaseSet segment_base(double lo, double hi) {
  cf::BaseSet b;
  b.param_dim = 1;
  b.at = [lo, hi](std::span<const double> u) { return cf::Point{lo + (hi - lo) * u[0], 0.0}; };
  b.contains = [lo, hi](const cf::Point& p) { return p[1] == 0.0 && p[0] >= lo && p[0] <= hi; };
  return b;
}

cf::LocalCollar vertical(double lo, double hi) {
  cf::LocalCollar c;
  c.name = "vertical";
  c.base = segment_base(lo, hi);
  c.forward = [](const cf::Point& x, double t) { return cf::Point{x[0], t}; };
  c.locate = [lo, hi](const cf::Point& y) -> std::optional<cf::CollarPoint> {
    if (y[1] < 0.0 || y[1] > 1.0 || y[0] < lo || y[0] > hi) return std::nullopt;
    return cf::CollarPoint{{y[0], 0.0}, y[1]};
  };
  return c;
}

double lipschitz_oracle(double C, double Ls, double L, double zeta, double N, double Cb) {
  const double m = std::max(1.0 + 2.0 * L, 1.0 + 1.0 / zeta);
  return C * (1.0 + Ls / 2.0) * (1.0 + 2.0 * Ls) * std::pow(m, N) * std::pow(Cb, N);
}

double inverse_oracle(double C, double Ls, double L, double zeta, double N, double Cb) {
  return C * (1.0 + Ls / 2.0) * std::pow(Cb, 2.0 * N) * std::pow(1.0 + C / zeta + L / 2.0, N) *
         std::pow(3.0 + 1.0 / zeta + 3.0 * L, N);
}

cf::ConstantBundle bundle(double C, double Ls, double L, double zeta, std::uint64_t N, double Cb) {
  cf::ConstantBundle b;
  b.C = C;
  b.L_sigma = Ls;
  b.L = L;
  b.zeta = zeta;
  b.N = N;
  b.C_b = Cb;
  return b;
}

}  // namespace

TEST_CASE("identity has Lipschitz estimate one", "[estimate]") {
  const auto m = cf::point_map(box_base(1.0, 2.0), [](const cf::Point& x) { return x; });
  const auto e = cf::estimate_lipschitz(m, {.pairs = 2000, .seed = 1});
  CHECK(e.value == 1.0);
  CHECK(e.witness.has_value());
  CHECK(cf::estimate_inverse_lipschitz(m, {.pairs = 2000, .seed = 1}).value == 1.0);
}

TEST_CASE("doubling has Lipschitz estimate two", "[estimate]") {
  const auto m = cf::point_map(segment_base(0.0, 1.0), [](const cf::Point& x) { return 2.0 * x; });
  CHECK_THAT(cf::estimate_lipschitz(m, {.pairs = 1000}).value, WithinAbs(2.0, 1e-12));
  CHECK_THAT(cf::estimate_inverse_lipschitz(m, {.pairs = 1000}).value, WithinAbs(0.5, 1e-12));
}

TEST_CASE("anisotropic scaling is recovered within one percent", "[estimate]") {
  const auto m = cf::point_map(box_base(1.0, 1.0), [](const cf::Point& x) { return cf::Point{3.0 * x[0], x[1]}; });
  const auto e = cf::estimate_lipschitz(m, {.pairs = 10000, .seed = 5});
  CHECK(e.value <= 3.0 + 1e-12);
  CHECK(e.value >= 0.99 * 3.0);
  const auto i = cf::estimate_inverse_lipschitz(m, {.pairs = 10000, .seed = 5});
  CHECK(i.value <= 1.0 + 1e-12);
  CHECK(i.value >= 0.99);
}

TEST_CASE("radial circle collar estimate lies below its analytic bound", "[estimate]") {
  const auto f = cf::make_circle_in_disk(1.0);
  const auto m = cf::collar_map(f.collars[0]);
  const auto e = cf::estimate_lipschitz(m, {.pairs = 10000, .seed = 2});
  // |c(x,s) - c(y,t)| <= (1 - s/2)|x - y| + |y||s - t|/2 <= dist(x,y) + |s - t|.
  CHECK(e.value >= 0.99);
  CHECK(e.value <= 1.0 + 1e-12);
  REQUIRE(e.witness.has_value());
  const auto q = cf::quotient(m, e.witness->first, e.witness->second, cf::QuotientKind::Forward);
  CHECK(*q == e.value);
}

TEST_CASE("estimates do not depend on the thread count", "[estimate]") {
  const auto f = cf::make_circle_in_disk(0.5);
  const auto m = cf::collar_map(f.collars[0]);
  const cf::PairOptions opts{.pairs = 5000, .seed = 9};
  const auto many = cf::estimate_inverse_lipschitz(m, opts);
  setenv("COLLAR_FORGE_THREADS", "1", 1);
  const auto one = cf::estimate_inverse_lipschitz(m, opts);
  unsetenv("COLLAR_FORGE_THREADS");
  CHECK(many.value == one.value);
  CHECK(many.witness->first == one.witness->first);
  CHECK(many.witness->second == one.witness->second);
}

TEST_CASE("ties go to the lexicographically smallest pair", "[estimate]") {
  const auto m = cf::point_map(segment_base(0.0, 1.0), [](const cf::Point& x) { return x; });
  const cf::PairOptions opts{.pairs = 300, .seed = 4};
  const auto pairs = cf::sample_pairs(m, opts);
  const auto e = cf::estimate_quotient(m, pairs, cf::QuotientKind::Forward);
  std::optional<std::vector<double>> smallest;
  for (const auto& [a, b] : pairs) {
    if (cf::euclidean_distance(a, b) < cf::kDegeneratePair) continue;
    std::vector<double> key{a[0], a[1], b[0], b[1]};
    if (!smallest || key < *smallest) smallest = key;
  }
  REQUIRE(smallest.has_value());
  const std::vector<double> got{e.witness->first[0], e.witness->first[1], e.witness->second[0],
                                e.witness->second[1]};
  CHECK(got == *smallest);
}

TEST_CASE("pairs snap to height anchors and include near pairs", "[pairs]") {
  const auto m = cf::collar_map(segment_base(0.0, 1.0), [](const cf::Point& x, double t) { return cf::Point{x[0], t}; });
  const auto pairs = cf::sample_pairs(m, {.pairs = 4000, .seed = 3});
  REQUIRE(pairs.size() == 4000);
  std::size_t base_slice = 0, top = 0, near = 0;
  for (const auto& [a, b] : pairs) {
    base_slice += a.height == 0.0 ? 1 : 0;
    top += a.height == 1.0 ? 1 : 0;
    near += m.dist_in(a, b) < 1e-3 ? 1 : 0;
  }
  CHECK(base_slice > 300);
  CHECK(top > 300);
  CHECK(near > 800);
}

TEST_CASE("all-degenerate pair sets are an error", "[estimate]") {
  cf::BaseSet point;
  point.param_dim = 1;
  point.at = [](std::span<const double>) { return cf::Point{0.0, 0.0}; };
  point.contains = [](const cf::Point&) { return true; };
  const auto m = cf::point_map(point, [](const cf::Point& x) { return x; });
  CHECK_THROWS_AS(cf::estimate_lipschitz(m, {.pairs = 100}), cf::Error);
}

TEST_CASE("bound formulas at plug-in bundles", "[bounds]") {
  const auto trivial = bundle(1.0, 0.0, 0.0, 1.0, 1, 1.0);
  CHECK(cf::collar_lipschitz_bound(trivial) == lipschitz_oracle(1, 0, 0, 1, 1, 1));
  CHECK(cf::collar_lipschitz_bound(trivial) == 2.0);
  CHECK(cf::collar_inverse_lipschitz_bound(trivial) == inverse_oracle(1, 0, 0, 1, 1, 1));
  CHECK(cf::collar_inverse_lipschitz_bound(trivial) == 8.0);

  const auto mid = bundle(1.0, 2.0, 1.0, 0.25, 1, 1.0);
  CHECK(cf::collar_lipschitz_bound(mid) == lipschitz_oracle(1, 2, 1, 0.25, 1, 1));
  CHECK(cf::collar_lipschitz_bound(mid) == 50.0);

  const auto empty = bundle(1.5, 3.0, 2.0, 0.1, 0, 7.0);
  CHECK(cf::collar_lipschitz_bound(empty) == 1.5 * (1.0 + 1.5) * (1.0 + 6.0));
  CHECK(cf::collar_inverse_lipschitz_bound(empty) == 1.5 * (1.0 + 1.5));

  const auto general = bundle(1.7, 0.9, 0.4, 0.13, 3, 2.2);
  CHECK_THAT(cf::collar_lipschitz_bound(general), WithinRel(lipschitz_oracle(1.7, 0.9, 0.4, 0.13, 3, 2.2), 1e-14));
  CHECK_THAT(cf::collar_inverse_lipschitz_bound(general), WithinRel(inverse_oracle(1.7, 0.9, 0.4, 0.13, 3, 2.2), 1e-14));

  CHECK_THROWS_AS(cf::collar_lipschitz_bound(bundle(1.0, 0.0, 0.0, 0.0, 1, 1.0)), cf::Error);
}

TEST_CASE("bounds are monotone in each constant", "[bounds]") {
  const auto base = bundle(1.2, 1.0, 0.5, 0.3, 2, 1.5);
  const double L0 = cf::collar_lipschitz_bound(base);
  const double I0 = cf::collar_inverse_lipschitz_bound(base);
  auto bumped = [&](auto edit) {
    auto b = base;
    edit(b);
    return std::pair{cf::collar_lipschitz_bound(b), cf::collar_inverse_lipschitz_bound(b)};
  };
  for (auto [L, I] : {bumped([](cf::ConstantBundle& b) { b.C *= 1.1; }),
                      bumped([](cf::ConstantBundle& b) { b.L_sigma *= 1.1; }),
                      bumped([](cf::ConstantBundle& b) { b.L *= 1.1; }),
                      bumped([](cf::ConstantBundle& b) { b.C_b *= 1.1; }),
                      bumped([](cf::ConstantBundle& b) { b.N += 1; }),
                      bumped([](cf::ConstantBundle& b) { b.zeta *= 0.9; })}) {
    CHECK(L >= L0);
    CHECK(I >= I0);
  }
}

TEST_CASE("image margin of the circle annulus", "[zeta]") {
  for (double r : {1.0, 0.1}) {
    const auto gc = cf::assemble(cf::make_circle_in_disk(r));
    // Bands reach radius (1 - 3/8) r; the image annulus ends at r/2.
    const double analytic = (1.0 - 0.375) * r - 0.5 * r;
    CHECK_THAT(cf::estimate_zeta(gc), WithinRel(analytic, 0.02));
  }
}

TEST_CASE("image margin vanishes when bands touch the image boundary", "[zeta]") {
  auto f = cf::make_circle_in_disk(1.0);
  f.dom.in_ambient = [](const cf::Point&) { return true; };
  const auto gc = cf::assemble(f);
  try {
    (void)cf::estimate_zeta(gc);
    FAIL("expected an error");
  } catch (const cf::Error& e) {
    CHECK(e.kind() == cf::ErrorKind::NumericFailure);
  }
}

TEST_CASE("overlap chain counts", "[overlap]") {
  CHECK(cf::overlap_chain_count({vertical(0.0, 1.0), vertical(2.0, 3.0), vertical(4.0, 5.0)}) == 1);
  CHECK(cf::overlap_chain_count({vertical(0.0, 1.5), vertical(1.0, 2.5), vertical(2.0, 3.5)}) == 2);
  std::vector<cf::LocalCollar> all(4, vertical(0.0, 3.0));
  CHECK(cf::overlap_chain_count(all) == 4);
  const auto meet = cf::image_overlaps({vertical(0.0, 1.5), vertical(1.0, 2.5), vertical(2.0, 3.5)});
  CHECK(meet[0][1]);
  CHECK_FALSE(meet[0][2]);
}
