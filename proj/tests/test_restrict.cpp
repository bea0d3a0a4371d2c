#include <catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <string>

#include "collar_forge/restrict.hpp"

namespace cf = collar_forge;
using Catch::Matchers::WithinAbs;

namespace {

// Vertical collar (x, 0) -> (x, t) over the segment [lo, hi] x {0}.
cf::LocalCollar vertical(double lo, double hi, std::string name = "vertical") {
  cf::LocalCollar c;
  c.name = std::move(name);
  c.base.param_dim = 1;
  c.base.at = [lo, hi](std::span<const double> u) { return cf::Point{lo + (hi - lo) * u[0], 0.0}; };
  c.base.contains = [lo, hi](const cf::Point& p) { return p[1] == 0.0 && p[0] >= lo && p[0] <= hi; };
  c.forward = [](const cf::Point& x, double t) { return cf::Point{x[0], t}; };
  c.locate = [lo, hi](const cf::Point& y) -> std::optional<cf::CollarPoint> {
    if (y[1] < 0.0 || y[1] > 1.0 || y[0] < lo || y[0] > hi) return std::nullopt;
    return cf::CollarPoint{{y[0], 0.0}, y[1]};
  };
  return c;
}

}  // namespace

TEST_CASE("restriction away from nothing keeps the collar", "[restrict]") {
  const auto c = vertical(0.0, 3.0);
  const auto r = cf::restrict_collar(c, cf::SetDescriptor::empty());
  const auto cut = r.collar();
  for (const auto& x : c.base.sample(50, 0)) {
    CHECK(r.cut(x) == 1.0);
    for (double t : {0.0, 0.4, 1.0}) CHECK(cut.forward(x, t) == c.forward(x, t));
  }
}

TEST_CASE("restriction keeps images below a half-plane", "[restrict]") {
  const auto c = vertical(0.0, 3.0);
  const cf::SetDescriptor above{cf::HalfSpace{{0.0, 1.0}, 0.5}, false};
  const auto r = cf::restrict_collar(c, above);
  const auto cut = r.collar();
  double highest = 0.0;
  for (const auto& x : c.base.sample(500, 3)) {
    const double d = r.cut(x);
    CHECK(d > 0.0);
    CHECK(d <= 1.0);
    for (int k = 0; k <= 10; ++k) highest = std::max(highest, cut.forward(x, k / 10.0)[1]);
    CHECK(cut.forward(x, 0.0) == x);
  }
  CHECK(highest < 0.5);
  CHECK(highest > 0.49);
}

TEST_CASE("restricted collar inverts on its shortened image", "[restrict]") {
  const auto c = vertical(0.0, 3.0);
  const auto r = cf::restrict_collar(c, {cf::HalfSpace{{0.0, 1.0}, 0.5}, false});
  const auto cut = r.collar();
  const cf::Point x{1.3, 0.0};
  const cf::Point y = cut.forward(x, 0.6);
  const auto back = cut.locate(y);
  REQUIRE(back.has_value());
  CHECK_THAT(back->height, WithinAbs(0.6, 1e-12));
  CHECK_FALSE(cut.locate({1.3, 0.9}).has_value());
}

TEST_CASE("restriction rejects a set that meets the base", "[restrict]") {
  const auto c = vertical(0.0, 3.0);
  CHECK_THROWS_AS(cf::restrict_collar(c, {cf::Ball{{1.0, 0.0}, 0.2}, false}), cf::Error);
}

TEST_CASE("merging disjoint collars evaluates piecewise", "[merge]") {
  const auto a = vertical(0.0, 1.0, "a");
  const auto b = vertical(2.0, 3.0, "b");
  const double eps = 0.4;
  const std::vector<cf::SetDescriptor> seps{{cf::Box{{-eps, -eps}, {1.0 + eps, 2.0}}, false},
                                            {cf::Box{{2.0 - eps, -eps}, {3.0 + eps, 2.0}}, false}};
  const cf::Box bounds{{-1.0, -1.0}, {4.0, 3.0}};
  const auto merged = cf::merge_discrete_collars({a, b}, seps, bounds);
  CHECK(merged.base.contains({0.5, 0.0}));
  CHECK(merged.base.contains({2.5, 0.0}));
  CHECK_FALSE(merged.base.contains({1.5, 0.0}));
  for (double x : {0.0, 0.5, 1.0, 2.0, 2.5, 3.0})
    for (double t : {0.0, 0.5, 1.0}) {
      const cf::Point y = merged.forward({x, 0.0}, t);
      CHECK(y[0] == x);
      CHECK(y[1] <= t);
      CHECK(y[1] < 2.0);
    }
  for (const auto& x : merged.base.sample(40, 1)) CHECK(merged.base.contains(x));

  try {
    (void)merged.forward({1.5, 0.0}, 0.3);
    FAIL("expected an error");
  } catch (const cf::Error& e) {
    CHECK(e.kind() == cf::ErrorKind::OutsideBase);
  }
}

TEST_CASE("merging a single collar returns it", "[merge]") {
  const auto a = vertical(0.0, 1.0, "a");
  const auto merged = cf::merge_discrete_collars({a}, {cf::SetDescriptor::everything()}, cf::Box{{-1.0, -1.0}, {2.0, 2.0}});
  CHECK(merged.name == "a");
  CHECK(merged.forward({0.3, 0.0}, 0.7) == a.forward({0.3, 0.0}, 0.7));
}

TEST_CASE("merging rejects overlapping bases and separations", "[merge]") {
  const cf::Box bounds{{-1.0, -1.0}, {4.0, 3.0}};
  const auto a = vertical(0.0, 1.5, "a");
  const auto b = vertical(1.0, 3.0, "b");
  const std::vector<cf::SetDescriptor> wide{{cf::Box{{-1.0, -1.0}, {2.0, 2.0}}, false},
                                            {cf::Box{{0.5, -1.0}, {4.0, 2.0}}, false}};
  CHECK_THROWS_AS(cf::merge_discrete_collars({a, b}, wide, bounds), cf::Error);

  const auto c = vertical(2.0, 3.0, "c");
  const std::vector<cf::SetDescriptor> touching{{cf::Box{{-1.0, -1.0}, {2.2, 2.0}}, false},
                                                {cf::Box{{1.8, -1.0}, {4.0, 2.0}}, false}};
  CHECK_THROWS_AS(cf::merge_discrete_collars({vertical(0.0, 1.0), c}, touching, bounds), cf::Error);
}
