#include <catch_amalgamated.hpp>

#include <cmath>

#include "collar_forge/metric.hpp"
#include "collar_forge/region.hpp"

namespace cf = collar_forge;
using Catch::Matchers::WithinAbs;

namespace {

cf::MetricDomain unit_square_domain() {
  cf::MetricDomain dom;
  dom.dim = 2;
  dom.base.param_dim = 2;
  dom.base.at = [](std::span<const double> u) { return cf::Point{u[0], u[1]}; };
  dom.base.contains = [](const cf::Point&) { return true; };
  dom.region_bounds = cf::Box{{0.0, 0.0}, {1.0, 1.0}};
  return dom;
}

}  // namespace

TEST_CASE("product distance adds base distance and height gap", "[metric]") {
  const auto dom = unit_square_domain();
  const cf::Point x{0.3, -1.2};
  CHECK(cf::product_distance({x, 0.0}, {x, 0.0}, dom) == 0.0);
  CHECK(cf::product_distance({x, 0.0}, {x, 1.0}, dom) == 1.0);

  const double oracle = std::hypot(3.0 - 0.0, 4.0 - 0.0) + std::abs(0.5 - 0.2);
  CHECK_THAT(cf::product_distance({{0.0, 0.0}, 0.2}, {{3.0, 4.0}, 0.5}, dom), WithinAbs(oracle, 1e-15));
  CHECK_THAT(oracle, WithinAbs(5.3, 1e-15));
}

TEST_CASE("product distance rejects mismatched dimensions", "[metric]") {
  const auto dom = unit_square_domain();
  try {
    (void)cf::product_distance({{0.0, 0.0, 0.0}, 0.0}, {{0.0, 0.0}, 0.0}, dom);
    FAIL("expected an error");
  } catch (const cf::Error& e) {
    CHECK(e.kind() == cf::ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("distance to sets and to their complements", "[metric]") {
  const cf::SetDescriptor disk{cf::Ball{{0.0, 0.0}, 1.0}, false};
  CHECK(cf::interior_margin({0.0, 0.0}, disk) == 1.0);
  CHECK(cf::dist_to_set({0.5, 0.0}, disk) == 0.0);
  const cf::Point p{2.0, 0.0};
  CHECK_THAT(cf::dist_to_set(p, disk), WithinAbs(cf::norm(p) - 1.0, 1e-15));
  CHECK(std::isinf(cf::dist_to_set(p, cf::SetDescriptor::empty())));

  const cf::SetDescriptor box{cf::Box{{0.0, 0.0}, {2.0, 1.0}}, false};
  CHECK_THAT(cf::dist_to_set({3.0, 2.0}, box), WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK_THAT(cf::interior_margin({0.5, 0.5}, box), WithinAbs(0.5, 1e-15));
  CHECK(cf::interior_margin({2.0, 0.5}, box) == 0.0);

  const cf::SetDescriptor upper{cf::HalfSpace{{0.0, 2.0}, 1.0}, false};
  CHECK_THAT(cf::dist_to_set({7.0, 0.0}, upper), WithinAbs(0.5, 1e-15));
  CHECK_THAT(cf::interior_margin({7.0, 1.5}, upper), WithinAbs(1.0, 1e-15));

  const cf::SetDescriptor path{cf::Polyline{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}, false}, false};
  CHECK_THAT(cf::dist_to_set({2.0, 0.5}, path), WithinAbs(1.0, 1e-15));
  CHECK_THAT(cf::dist_to_set({-1.0, 0.0}, path), WithinAbs(1.0, 1e-15));
}

TEST_CASE("quasi-random samples are deterministic and contained", "[sampling]") {
  const cf::SetDescriptor unit{cf::Box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, false};
  const auto a = cf::quasi_random_sample(unit, 1, 0);
  const auto b = cf::quasi_random_sample(unit, 1, 0);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == b[0]);

  const auto many = cf::quasi_random_sample(unit, 1000, 0);
  REQUIRE(many.size() == 1000);
  for (const auto& p : many)
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(p[i] >= 0.0);
      CHECK(p[i] <= 1.0);
    }
  CHECK_FALSE(cf::quasi_random_sample(unit, 4, 1)[0] == cf::quasi_random_sample(unit, 4, 2)[0]);
}

TEST_CASE("circle samples lie on the circle", "[sampling]") {
  const double r = 0.7;
  const cf::Point c{1.0, -2.0};
  const auto pts = cf::quasi_random_sample({cf::Circle{c, r}, false}, 4, 1);
  REQUIRE(pts.size() == 4);
  for (const auto& p : pts) CHECK_THAT(cf::euclidean_distance(p, c), WithinAbs(r, 1e-12));
}

TEST_CASE("degenerate regions cannot be sampled", "[sampling]") {
  const cf::SetDescriptor flat{cf::Box{{0.0, 0.0}, {1.0, 0.0}}, false};
  CHECK_THROWS_AS(cf::quasi_random_sample(flat, 3, 0), cf::Error);
  CHECK_THROWS_AS(cf::quasi_random_sample(cf::SetDescriptor::everything(), 3, 0), cf::Error);
  CHECK_THROWS_AS(cf::quasi_random_sample({cf::HalfSpace{{1.0, 0.0}, 0.0}, false}, 3, 0), cf::Error);
}

TEST_CASE("domain check confirms the metric axioms on samples", "[metric]") {
  const auto dom = unit_square_domain();
  const auto check = cf::check_domain(dom, 200, 3);
  CHECK(check.ok());
  CHECK(check.max_asymmetry == 0.0);
}
