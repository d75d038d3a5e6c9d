#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support/oracle.hpp"
#include "vservo/error.hpp"
#include "vservo/filter.hpp"

using namespace vservo;

TEST_CASE("zero-filled warm-up ramps up") {
  MovingAverageFilter f(4);
  CHECK(f.mean().r == Vec2{});
  f.push(MovingAverageFilter::Slot{{1.0, 0.0}, 1.0});
  CHECK(f.mean().r.x == 0.25);
  CHECK(f.mean().phi == 0.25);
  f.push(MovingAverageFilter::Slot{{1.0, 0.0}, 1.0});
  CHECK(f.mean().r.x == 0.5);
}

TEST_CASE("N pushes of a constant give the constant") {
  oracle::Gen g(21);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + g.index(12);
    MovingAverageFilter f(n);
    const MovingAverageFilter::Slot v{{g.uniform(-1, 1), g.uniform(-1, 1)}, g.uniform(-1, 1)};
    for (std::size_t k = 0; k < g.index(3); ++k) f.push(MovingAverageFilter::Slot{{0.3, 0.1}, -0.2});
    for (std::size_t k = 0; k < n; ++k) f.push(v);
    REQUIRE(std::abs(f.mean().r.x - v.r.x) <= 1e-12);
    REQUIRE(std::abs(f.mean().r.y - v.r.y) <= 1e-12);
    REQUIRE(std::abs(f.mean().phi - v.phi) <= 1e-12);
  }
}

TEST_CASE("mean never amplifies") {
  oracle::Gen g(22);
  for (int i = 0; i < 2000; ++i) {
    MovingAverageFilter f(1 + g.index(9));
    double max_norm = 0.0;
    for (int k = 0; k < 30; ++k) {
      const double th = g.uniform(-kPi, kPi);
      const double m = g.uniform(0.0, 1.0);
      f.push(MovingAverageFilter::Slot{{m * std::cos(th), m * std::sin(th)}, g.uniform(-1, 1)});
      for (const auto& s : f.ordered()) max_norm = std::max(max_norm, s.r.norm());
      REQUIRE(f.mean().r.norm() <= max_norm + 1e-12);
      REQUIRE(f.mean().r.norm() <= 1.0 + 1e-12);
      REQUIRE(std::abs(f.mean().phi) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("ordered() lists slots oldest first") {
  MovingAverageFilter f(3);
  for (int k = 1; k <= 4; ++k) f.push(MovingAverageFilter::Slot{{double(k), 0.0}, 0.0});
  const auto o = f.ordered();
  REQUIRE(o.size() == 3);
  CHECK(o[0].r.x == 2.0);
  CHECK(o[2].r.x == 4.0);
  CHECK(f.write_index() == 1);
}

TEST_CASE("reset and bad input") {
  MovingAverageFilter f(2);
  f.push(MovingAverageFilter::Slot{{1.0, 1.0}, 1.0});
  f.reset();
  CHECK(f.mean().r == Vec2{});
  CHECK_THROWS_AS(MovingAverageFilter(0), InvalidArgument);
  CHECK_THROWS_AS(f.push(MovingAverageFilter::Slot{{std::nan(""), 0.0}, 0.0}), InvalidArgument);
}

TEST_CASE("ring contents and means") {
  using Slot = MovingAverageFilter::Slot;
  MovingAverageFilter one(1);
  one.push(Slot{{0.3, -0.2}, 0.1});
  REQUIRE(one.ordered().size() == 1);
  CHECK(one.ordered()[0] == Slot{{0.3, -0.2}, 0.1});

  MovingAverageFilter three(3);
  three.push(Slot{{1, 1}, 1});
  const auto o = three.ordered();
  CHECK(o[2] == Slot{{1, 1}, 1});
  CHECK(o[0] == Slot{});
  CHECK(o[1] == Slot{});

  MovingAverageFilter two(2);
  const Slot a{{0.1, 0}, 0}, b{{0.2, 0}, 0}, c{{0.3, 0}, 0};
  two.push(a);
  two.push(b);
  two.push(c);
  CHECK(two.ordered() == std::vector<Slot>{b, c});

  MovingAverageFilter m(3);
  for (double phi : {1.0, 2.0, 3.0}) m.push(Slot{{}, phi});
  CHECK(m.mean().phi == doctest::Approx(2.0));

  MovingAverageFilter warm(3);
  warm.push(Slot{{}, 3.0});
  CHECK(warm.mean().phi == doctest::Approx(1.0));

  MovingAverageFilter sym(4);
  for (Vec2 r : {Vec2{1, 0}, Vec2{0, 1}, Vec2{-1, 0}, Vec2{0, -1}}) sym.push(Slot{r, 0.0});
  CHECK(sym.mean().r.norm() < 1e-15);
}
