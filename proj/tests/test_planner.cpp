#include <doctest.h>

#include <chrono>
#include <cmath>

#include "support/oracle.hpp"
#include "vservo/error.hpp"
#include "vservo/planner.hpp"

using namespace vservo;

namespace {

Vector6 rhs(const BoundaryState& s, const BoundaryState& t) {
  Vector6 b;
  b << s.v, s.a, s.j, t.v, t.a, t.j;
  return b;
}

BoundaryState random_state(oracle::Gen& g, const KinematicLimits& l, std::size_t axis) {
  return {g.uniform(-1, 1) * l.velocity(axis), g.uniform(-1, 1) * l.acceleration(axis),
          g.uniform(-1, 1) * l.jerk(axis)};
}

}  // namespace

TEST_CASE("unit rest-to-rest quintic matches the independent solve") {
  const BoundaryState start{0, 0, 0}, target{1, 0, 0};
  const auto sys = build_system(start, target, 0.0, 1.0);
  const auto q = solve_coefficients(sys.m, sys.b);
  const auto ref = oracle::gauss_solve(oracle::quintic_system(0.0L, 1.0L, {0, 0, 0}, {1, 0, 0}));
  const std::array<double, 6> expected{0, 0, 0, 10, -15, 6};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(q[i] - expected[i]) <= 1e-9);
    CHECK(std::abs(ref[i] - expected[i]) <= 1e-9);
  }
  QuinticSegment seg{q, 0.0, 1.0};
  CHECK(seg.value(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(seg.derivative(0.5, 1) == doctest::Approx(1.875));
}

TEST_CASE("boundary matrix rows are monomial derivatives") {
  oracle::Gen g(31);
  for (int i = 0; i < 200; ++i) {
    const double ts = g.uniform(-2, 2);
    const double tt = ts + g.uniform(0.01, 1.0);
    const Matrix6 m = boundary_matrix(ts, tt);
    const auto ref = oracle::quintic_system(ts, tt, {0, 0, 0}, {0, 0, 0});
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        REQUIRE(m(r, c) == doctest::Approx(static_cast<double>(ref[r][c])).epsilon(1e-14));
      }
    }
  }
  CHECK_THROWS_AS(build_system({}, {}, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("solver residual over random well-posed systems") {
  oracle::Gen g(32);
  const KinematicLimits l;
  for (int i = 0; i < 10000; ++i) {
    const double t_d = g.coin() ? 1.0 / 60.0 : 1.0 / 30.0;
    const std::size_t axis = g.index(3);
    const auto s = random_state(g, l, axis);
    const auto t = random_state(g, l, axis);
    const auto sys = build_system(s, t, 0.0, t_d);
    const auto q = solve_coefficients(sys.m, sys.b);
    Vector6 qv;
    for (int k = 0; k < 6; ++k) qv(k) = q[static_cast<std::size_t>(k)];
    const double residual = (sys.m * qv - sys.b).cwiseAbs().maxCoeff();
    REQUIRE(residual <= 1e-9 * std::max(1.0, sys.b.cwiseAbs().maxCoeff()));

    const auto ref = oracle::gauss_solve(oracle::quintic_system(0.0L, t_d, {s.v, s.a, s.j},
                                                                {t.v, t.a, t.j}));
    for (std::size_t k = 0; k < 6; ++k) {
      REQUIRE(q[k] == doctest::Approx(ref[k]).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("degenerate or badly conditioned systems fail loudly") {
  Matrix6 singular = boundary_matrix(0.0, 1.0);
  singular.row(5) = singular.row(4);
  QuinticSolver bad(singular);
  CHECK_FALSE(bad.well_conditioned());
  CHECK_THROWS_AS(bad.solve(Vector6::Zero()), NumericalFailure);

  QuinticSolver good(boundary_matrix(0.0, 1.0 / 60.0));
  CHECK(good.well_conditioned());

  // Far from the origin the monomial basis loses all precision.
  QuinticSolver far(boundary_matrix(1e5, 1e5 + 1.0 / 60.0));
  CHECK_FALSE(far.well_conditioned());
}

TEST_CASE("map_targets scales by the limits") {
  const KinematicLimits l;
  const auto s = map_targets({{0.6, -0.8}, 0.5}, l);
  CHECK(s[kAxisX] == BoundaryState{0.6 * l.v_max, 0.6 * l.a_max, 0.6 * l.j_max});
  CHECK(s[kAxisY].v == doctest::Approx(-0.8 * l.v_max));
  CHECK(s[kAxisPhi] == BoundaryState{0.5 * l.omega_max, 0.5 * l.alpha_max, 0.5 * l.zeta_max});
  CHECK_THROWS_AS(map_targets({{1.0, 0.1}, 0.0}, l), InvalidArgument);
  CHECK_THROWS_AS(map_targets({{0.0, 0.0}, -1.1}, l), InvalidArgument);

  oracle::Gen g(33);
  for (int i = 0; i < 5000; ++i) {
    const double th = g.uniform(-kPi, kPi);
    const double m = g.uniform(0, 1);
    const auto t = map_targets({{m * std::cos(th), m * std::sin(th)}, g.uniform(-1, 1)}, l);
    for (std::size_t a = 0; a < kNumAxes; ++a) {
      REQUIRE(std::abs(t[a].v) <= l.velocity(a));
      REQUIRE(std::abs(t[a].a) <= l.acceleration(a));
      REQUIRE(std::abs(t[a].j) <= l.jerk(a));
    }
  }
}

TEST_CASE("timing rounds the sample count down") {
  const Timing t = Timing::make(1.0 / 60.0, 1.0 / 500.0);
  CHECK(t.k == 8);
  CHECK(Timing::make(1.0 / 30.0, 1.0 / 250.0).k == 8);
  CHECK(Timing::make(0.02, 0.002).k == 10);
  CHECK_THROWS_AS(Timing::make(0.003, 0.002), InvalidArgument);
  Timing bad = t;
  bad.k = 9;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("samples are taken at i * T_R and exclude the endpoint") {
  const KinematicLimits l;
  const Timing timing = Timing::make(1.0 / 60.0, 1.0 / 500.0);
  QuinticPlanner planner(l, timing);
  const auto c = planner.plan({{0.5, 0.0}, 0.0});
  REQUIRE(c.raw.samples.size() == timing.k);
  CHECK(c.raw.dt == timing.t_r);
  CHECK(c.raw.samples[0].v_x == 0.0);
  for (std::size_t i = 0; i < timing.k; ++i) {
    const double t = static_cast<double>(i) * timing.t_r;
    CHECK(c.raw.samples[i].v_x == doctest::Approx(c.segments[kAxisX].value(t)));
  }
  CHECK(c.segments[kAxisX].value(timing.t_d) == doctest::Approx(0.5 * l.v_max).epsilon(1e-12));
}

TEST_CASE("consecutive cycles chain exactly") {
  oracle::Gen g(34);
  const KinematicLimits l;
  QuinticPlanner planner(l, Timing::make(1.0 / 60.0, 1.0 / 500.0));
  AxisStates prev_target{};
  for (int n = 0; n < 500; ++n) {
    const double th = g.uniform(-kPi, kPi);
    const double m = g.uniform(0, 1);
    const auto c = planner.plan({{m * std::cos(th), m * std::sin(th)}, g.uniform(-1, 1)});
    REQUIRE(c.start == prev_target);
    REQUIRE(planner.boundary() == c.target);
    prev_target = c.target;
  }
  planner.reset();
  CHECK(planner.boundary() == AxisStates{});
}

TEST_CASE("check_limits clamps and reports the overshoot ratio") {
  const KinematicLimits l;
  VelocityTrajectory t;
  t.dt = 0.002;
  t.samples = {{0.1, -0.3, 0.5}, {0.2, 0.0, -2.0}};
  const auto r = check_limits(t, l);
  CHECK(r.ratio[kAxisX] == doctest::Approx(0.8));
  CHECK(r.ratio[kAxisY] == doctest::Approx(1.2));
  CHECK(r.ratio[kAxisPhi] == doctest::Approx(2.0));
  CHECK(r.exceeded());
  CHECK(r.clamped.samples[0].v_y == -l.v_max);
  CHECK(r.clamped.samples[1].omega == -l.omega_max);
  CHECK(r.clamped.samples[0].v_x == 0.1);
}

TEST_CASE("emitted samples respect the limits, raw ones may not") {
  const KinematicLimits l;
  QuinticPlanner planner(l, Timing::make(1.0 / 60.0, 1.0 / 500.0));
  double max_raw = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double s = (n / 10) % 2 == 0 ? 1.0 : -1.0;
    const auto c = planner.plan({{s, 0.0}, s});
    max_raw = std::max(max_raw, c.max_overshoot);
    for (const auto& smp : c.emitted.samples) {
      REQUIRE(std::abs(smp.v_x) <= l.v_max);
      REQUIRE(std::abs(smp.omega) <= l.omega_max);
    }
  }
  MESSAGE("max pre-clamp ratio under bang-bang commands: " << max_raw);
  CHECK(max_raw > 1.0);
}

TEST_CASE("planning a cycle is far cheaper than one controller period") {
  const KinematicLimits l;
  const Timing timing = Timing::make(1.0 / 60.0, 1.0 / 500.0);
  QuinticPlanner planner(l, timing);
  constexpr int kCycles = 20000;
  const auto t0 = std::chrono::steady_clock::now();
  double sink = 0.0;
  for (int n = 0; n < kCycles; ++n) {
    const double s = std::sin(n * 0.01);
    sink += planner.plan({{0.5 * s, 0.3}, s}).emitted.samples.back().v_x;
  }
  const double per_cycle =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / kCycles;
  MESSAGE("mean planning time per cycle: " << per_cycle * 1e6 << " us (sink " << sink << ")");
  CHECK(per_cycle < timing.t_r / 10.0);
}

TEST_CASE("shifted time origin: same profile near zero, failure far away") {
  const KinematicLimits l;
  const Timing timing = Timing::make(1.0 / 60.0, 1.0 / 500.0);
  QuinticPlanner a(l, timing), b(l, timing);
  const FilteredCommand cmd{{0.4, -0.2}, 0.7};
  const auto ca = a.plan(cmd);
  const auto cb = b.plan_at(cmd, 0.1);
  for (std::size_t i = 0; i < timing.k; ++i) {
    CHECK(cb.raw.samples[i].v_x == doctest::Approx(ca.raw.samples[i].v_x).epsilon(1e-5));
    CHECK(cb.raw.samples[i].omega == doctest::Approx(ca.raw.samples[i].omega).epsilon(1e-5));
  }
  CHECK(cb.segments[kAxisX].t_start == 0.1);

  const auto before = b.boundary();
  CHECK_THROWS_AS(b.plan_at(cmd, 2.0), NumericalFailure);
  CHECK(b.boundary() == before);
}

TEST_CASE("worked values") {
  KinematicLimits l;
  l.omega_max = 0.8;
  const auto t = map_targets({{1, 0}, -0.5}, l);
  CHECK(t[kAxisX].v == 0.25);
  CHECK(t[kAxisY].v == 0.0);
  CHECK(t[kAxisPhi].v == doctest::Approx(-0.4));
  for (const auto& s : map_targets({{0, 0}, 0}, l)) CHECK(s == BoundaryState{});

  // Rows at t_s = 0 are the unit rows of value, slope and curvature.
  const Matrix6 m = boundary_matrix(0.0, 1.0);
  Matrix6 expect_top = Matrix6::Zero();
  expect_top(0, 0) = 1;
  expect_top(1, 1) = 1;
  expect_top(2, 2) = 2;
  CHECK(m.topRows(3) == expect_top.topRows(3));
  CHECK(m.row(3) == Eigen::RowVectorXd::Ones(6));
  CHECK(build_system({}, {}, 0.0, 1.0).b == Vector6::Zero());

  const auto zero = solve_coefficients(m, Vector6::Zero());
  for (double q : zero) CHECK(q == 0.0);

  const Timing four{0.4, 0.1, 4};
  std::array<QuinticSegment, kNumAxes> segs;
  for (auto& s : segs) s = QuinticSegment{{}, 0.0, 0.4};
  for (const auto& smp : evaluate_trajectory(segs, four).samples) CHECK(smp == TwistSample{});
  segs[kAxisX].coeffs[0] = 0.1;
  const auto traj = evaluate_trajectory(segs, four);
  REQUIRE(traj.samples.size() == 4);
  for (const auto& smp : traj.samples) CHECK(smp.v_x == 0.1);
  segs[kAxisY].t_end = 0.5;
  CHECK_THROWS_AS(evaluate_trajectory(segs, four), InvalidArgument);

  VelocityTrajectory fine{{{0.1, -0.2, 0.5}, {0.0, 0.25, -1.0}}, 0.002};
  const auto ok = check_limits(fine, {});
  CHECK(ok.max_ratio() <= 1.0);
  CHECK(ok.clamped.samples == fine.samples);
  VelocityTrajectory over{{{0.3, 0.0, 0.0}}, 0.002};
  const auto clamped = check_limits(over, {});
  CHECK(clamped.ratio[kAxisX] == doctest::Approx(1.2));
  CHECK(clamped.clamped.samples[0].v_x == 0.25);
}

TEST_CASE("intra-segment overshoot against dense resampling") {
  // Samples at the controller rate can miss the true peak of a segment;
  // resampling at 10x shows how much.
  oracle::Gen g(35);
  const KinematicLimits l;
  const Timing timing = Timing::make(1.0 / 60.0, 1.0 / 500.0);
  QuinticPlanner planner(l, timing, false);
  double sampled = 0.0, dense = 0.0;
  for (int n = 0; n < 2000; ++n) {
    AxisStates start{};
    for (std::size_t a = 0; a < kNumAxes; ++a) {
      start[a] = {g.uniform(-1, 1) * l.velocity(a), g.uniform(-1, 1) * l.acceleration(a),
                  g.uniform(-1, 1) * l.jerk(a)};
    }
    planner.set_boundary(start);
    const auto [x, y] = g.in_disc(1.0);
    const auto c = planner.plan({{x, y}, g.uniform(-1, 1)});
    sampled = std::max(sampled, c.max_overshoot);
    for (std::size_t a = 0; a < kNumAxes; ++a) {
      for (std::size_t i = 0; i < 10 * timing.k; ++i) {
        const double t = static_cast<double>(i) * timing.t_r / 10.0;
        dense = std::max(dense, std::abs(c.segments[a].value(t)) / l.velocity(a));
      }
    }
  }
  MESSAGE("overshoot ratio at K samples " << sampled << ", at 10K samples " << dense);
  CHECK(dense >= sampled);
  CHECK(dense < sampled * 1.05);
}
