#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "collar_forge/cover.hpp"
#include "collar_forge/lipschitz.hpp"

namespace cf = collar_forge;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = 3.14159265358979323846;

cf::MetricDomain interval_domain(double lo, double hi) {
  cf::MetricDomain dom;
  dom.dim = 1;
  dom.base.param_dim = 1;
  dom.base.at = [lo, hi](std::span<const double> u) { return cf::Point{lo + (hi - lo) * u[0]}; };
  dom.base.contains = [lo, hi](const cf::Point& p) { return p[0] >= lo && p[0] <= hi; };
  dom.region_bounds = cf::Box{{lo}, {hi}};
  return dom;
}

cf::MetricDomain unit_circle_domain() {
  cf::MetricDomain dom;
  dom.dim = 2;
  dom.base.param_dim = 1;
  dom.base.at = [](std::span<const double> u) {
    return cf::Point{std::cos(2.0 * kPi * u[0]), std::sin(2.0 * kPi * u[0])};
  };
  dom.base.contains = [](const cf::Point& p) { return std::abs(cf::norm(p) - 1.0) < 1e-12; };
  dom.region_bounds = cf::Box{{-1.0, -1.0}, {1.0, 1.0}};
  return dom;
}

cf::SetDescriptor interval(double lo, double hi) { return {cf::Box{{lo}, {hi}}, false}; }

// U1 = [0,2) and U2 = (1,3] inside B = [0,3].
cf::Cover two_intervals() {
  cf::Cover c;
  c.labels = {"left", "right"};
  c.members = {interval(-1.0, 2.0), interval(1.0, 4.0)};
  return c;
}

cf::Cover arcs(const std::vector<double>& angles, double radius) {
  cf::Cover c;
  for (double a : angles) {
    c.labels.push_back("arc");
    c.members.push_back({cf::Ball{{std::cos(a), std::sin(a)}, radius}, false});
  }
  return c;
}

// Bump of an open interval (a, b) in the line: min(1, max(0, margin - (delta - delta0))).
double interval_bump(double x, double a, double b, double delta, double delta0) {
  const double margin = std::max(0.0, std::min(x - a, b - x));
  return std::min(1.0, std::max(0.0, margin - (delta - delta0)));
}

}  // namespace

TEST_CASE("Lebesgue number of a single member is the box diameter", "[lebesgue]") {
  const auto dom = interval_domain(0.0, 3.0);
  cf::Cover c;
  c.members = {cf::SetDescriptor::everything()};
  CHECK(cf::estimate_lebesgue(c, dom, 200, 0) == cf::box_diameter(dom.region_bounds));
}

TEST_CASE("Lebesgue number of two overlapping intervals", "[lebesgue]") {
  const auto dom = interval_domain(0.0, 3.0);
  const double delta = cf::estimate_lebesgue(two_intervals(), dom, 1000, 0);
  // Every delta-ball around x in [0,3] fits in a member iff delta <= 0.5.
  double oracle = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 3000; ++k) {
    const double x = 3.0 * k / 3000.0;
    oracle = std::min(oracle, std::max(std::min(x + 1.0, 2.0 - x), std::min(x - 1.0, 4.0 - x)));
  }
  CHECK_THAT(oracle, WithinAbs(0.5, 1e-12));
  CHECK(delta > 0.0);
  CHECK(delta <= oracle);
}

TEST_CASE("disjoint members that miss a point are not a cover", "[lebesgue]") {
  const auto dom = interval_domain(0.0, 3.0);
  cf::Cover c;
  c.members = {interval(-1.0, 1.0), interval(2.0, 4.0)};
  try {
    (void)cf::estimate_lebesgue(c, dom, 200, 0);
    FAIL("expected an error");
  } catch (const cf::Error& e) {
    CHECK(e.kind() == cf::ErrorKind::NotACover);
    CHECK_FALSE(e.witnesses().empty());
  }
  CHECK_THROWS_AS(cf::compute_order(c, dom, 200, 0), cf::Error);
}

TEST_CASE("order of interval and arc covers", "[order]") {
  cf::Cover single;
  single.members = {cf::SetDescriptor::everything()};
  CHECK(cf::compute_order(single, interval_domain(0.0, 3.0), 100, 0) == 1);
  CHECK(cf::compute_order(two_intervals(), interval_domain(0.0, 3.0), 100, 0) == 2);

  const auto circle = unit_circle_domain();
  // Chord distances 2 sin(d/2) from the farthest point stay below 1.9.
  CHECK(cf::compute_order(arcs({0.0, kPi}, 1.9), circle, 500, 0) == 2);
  const auto triple = arcs({0.0, 1.0, 2.0}, 1.9);
  const cf::Point common{std::cos(1.0), std::sin(1.0)};
  CHECK(triple.count_containing(common) == 3);
  CHECK(cf::compute_order(triple, circle, 500, 0) == 3);
}

TEST_CASE("partition of unity on a single member is constant one", "[pou]") {
  const auto dom = interval_domain(0.0, 3.0);
  cf::Cover c;
  c.members = {cf::SetDescriptor::everything()};
  const auto pou = cf::build_pou(c, 1.0, 0.5, dom);
  for (const auto& x : dom.sample_base(50, 4)) CHECK(pou.weights(x)[0] == 1.0);
}

TEST_CASE("partition of unity of two intervals matches the interval formula", "[pou]") {
  const auto dom = interval_domain(0.0, 3.0);
  const double delta = 0.5, delta0 = 0.25;
  const auto pou = cf::build_pou(two_intervals(), delta, delta0, dom);
  CHECK(pou.order() == 2);

  auto oracle = [&](double x) {
    const double f1 = interval_bump(x, -1.0, 2.0, delta, delta0);
    const double f2 = interval_bump(x, 1.0, 4.0, delta, delta0);
    return std::vector<double>{f1 / (f1 + f2), f2 / (f1 + f2)};
  };
  const auto mid = pou.weights({1.5});
  CHECK_THAT(mid[0], WithinAbs(oracle(1.5)[0], 1e-15));
  CHECK_THAT(mid[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(mid[1], WithinAbs(0.5, 1e-15));
  const auto left = pou.weights({0.5});
  CHECK(left[0] == 1.0);
  CHECK(left[1] == 0.0);

  for (const auto& x : dom.sample_base(400, 9)) {
    const auto w = pou.weights(x);
    const auto o = oracle(x[0]);
    CHECK_THAT(w[0], WithinAbs(o[0], 1e-14));
    CHECK_THAT(w[0] + w[1], WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("partition of unity Lipschitz bounds on two intervals", "[pou]") {
  const auto dom = interval_domain(0.0, 3.0);
  const auto pou = cf::build_pou(two_intervals(), 0.5, 0.25, dom);
  CHECK(pou.bound_on_member() == 1.0 / 0.25);
  CHECK(pou.bound_partial_sum() == 2.0 / 0.25);
  for (std::size_t a = 0; a < 2; ++a) {
    const auto member = dom.base.restricted([&](const cf::Point& x) { return pou.cover().contains(a, x); });
    const auto m = cf::point_map(member, [&](const cf::Point& x) { return cf::Point{pou.weights(x)[a]}; });
    const auto e = cf::estimate_lipschitz(m, {.pairs = 4000, .seed = 2});
    CHECK(e.value <= pou.bound_on_member() + 1e-9);
  }
}

TEST_CASE("shrunken sets that fail to cover are reported", "[pou]") {
  const auto dom = interval_domain(0.0, 3.0);
  // Overlap (1,2) is narrower than 2 (delta - delta0), so V1 and V2 leave a gap.
  try {
    (void)cf::build_pou(two_intervals(), 1.5, 0.2, dom);
    FAIL("expected an error");
  } catch (const cf::Error& e) {
    CHECK(e.kind() == cf::ErrorKind::ShrunkenCoverFailure);
  }
  CHECK_THROWS_AS(cf::build_pou(two_intervals(), 0.5, 0.5, dom), cf::Error);
  CHECK_THROWS_AS(cf::build_pou(two_intervals(), 0.5, 0.0, dom), cf::Error);
}

TEST_CASE("greedy net on ordered interval samples", "[net]") {
  std::vector<cf::Point> candidates;
  for (int k = 0; k <= 12; ++k) candidates.push_back(cf::Point{0.25 * k});
  const auto net = cf::greedy_net(candidates, 1.0, cf::euclidean_distance);
  REQUIRE(net.points.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(net.points[k][0] == static_cast<double>(k));
  CHECK(net.covering_radius < 1.0);

  const auto dom = interval_domain(0.0, 3.0);
  CHECK(cf::greedy_maximal_net(dom, 10.0, 0, 200).points.size() == 1);
  auto unbounded = dom;
  unbounded.region_bounds = cf::Box{{0.0}, {std::numeric_limits<double>::infinity()}};
  CHECK_THROWS_AS(cf::greedy_maximal_net(unbounded, 1.0, 0), cf::Error);
}

TEST_CASE("net constants follow the weakly Lipschitz domain formulas", "[net]") {
  // N' = 5^n, N = floor((8C + 9)^n), L = 2(N' - 1), L_sigma = 2 N', zeta = 0.25 / C.
  const auto one = cf::net_constants(1, 1.0);
  CHECK(one.n_prime == 5);
  CHECK(one.n_chain == 17);
  CHECK(one.lambda_lipschitz == 8.0);
  CHECK(one.lambda_sum_lipschitz == 10.0);
  CHECK(one.zeta == 0.25);

  const auto two = cf::net_constants(2, 1.0);
  CHECK(two.n_prime == 25);
  CHECK(two.n_chain == 289);
  CHECK(two.lambda_lipschitz == 48.0);
  CHECK(two.lambda_sum_lipschitz == 50.0);
  CHECK(two.zeta == 0.25);

  const auto wide = cf::net_constants(1, 2.0);
  CHECK(wide.zeta == 0.125);
  CHECK(wide.n_chain == 25);

  CHECK_THROWS_AS(cf::net_constants(0, 1.0), cf::Error);
  CHECK_THROWS_AS(cf::net_constants(2, 0.5), cf::Error);
}
