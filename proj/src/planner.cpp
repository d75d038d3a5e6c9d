#include "vservo/planner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "vservo/error.hpp"

namespace vservo {

namespace {

constexpr double kMinRcond = 1e-12;
constexpr double kNormSlack = 1e-9;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string interval_name(double t_s, double t_t) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << t_s << ", " << t_t << "]";
  return os.str();
}

}  // namespace

void KinematicLimits::validate() const {
  if (!positive_finite(v_max) || !positive_finite(a_max) || !positive_finite(j_max) ||
      !positive_finite(omega_max) || !positive_finite(alpha_max) || !positive_finite(zeta_max)) {
    throw InvalidArgument("kinematic limits must be positive and finite");
  }
}

Timing Timing::make(double t_d, double t_r) {
  Timing t;
  t.t_d = t_d;
  t.t_r = t_r;
  if (!positive_finite(t_d) || !positive_finite(t_r)) {
    throw InvalidArgument("cycle times must be positive and finite");
  }
  // Guard against 0.02 / 0.002 = 9.999999...
  t.k = static_cast<std::size_t>(std::floor(t_d / t_r + 1e-9));
  t.validate();
  return t;
}

void Timing::validate() const {
  if (!positive_finite(t_d) || !positive_finite(t_r)) {
    throw InvalidArgument("cycle times must be positive and finite");
  }
  if (t_d < 2.0 * t_r * (1.0 - 1e-12)) {
    throw InvalidArgument("detection cycle must be at least twice the controller cycle");
  }
  const auto expected = static_cast<std::size_t>(std::floor(t_d / t_r + 1e-9));
  if (k != expected || k < 2) {
    throw InvalidArgument("trajectory point count must equal floor(t_d / t_r) and be >= 2");
  }
}

double QuinticSegment::derivative(double t, int order) const {
  if (order < 0) throw InvalidArgument("negative derivative order");
  if (order > 5) return 0.0;
  // Horner on the differentiated coefficients.
  double acc = 0.0;
  for (int i = 5; i >= order; --i) {
    double c = coeffs[static_cast<std::size_t>(i)];
    for (int d = 0; d < order; ++d) c *= static_cast<double>(i - d);
    acc = acc * t + c;
  }
  return acc;
}

BoundaryState QuinticSegment::state_at(double t) const {
  return {derivative(t, 0), derivative(t, 1), derivative(t, 2)};
}

AxisStates map_targets(const FilteredCommand& cmd, const KinematicLimits& limits) {
  const double rn = cmd.r.norm();
  if (!std::isfinite(rn) || !std::isfinite(cmd.phi)) {
    throw InvalidArgument("filtered command is not finite");
  }
  if (rn > 1.0 + kNormSlack) {
    throw InvalidArgument("filtered direction norm exceeds 1: " + std::to_string(rn));
  }
  if (std::abs(cmd.phi) > 1.0 + kNormSlack) {
    throw InvalidArgument("filtered orientation exceeds 1: " + std::to_string(cmd.phi));
  }
  AxisStates out;
  out[kAxisX] = {limits.v_max * cmd.r.x, limits.a_max * cmd.r.x, limits.j_max * cmd.r.x};
  out[kAxisY] = {limits.v_max * cmd.r.y, limits.a_max * cmd.r.y, limits.j_max * cmd.r.y};
  out[kAxisPhi] = {limits.omega_max * cmd.phi, limits.alpha_max * cmd.phi,
                   limits.zeta_max * cmd.phi};
  return out;
}

Matrix6 boundary_matrix(double t_s, double t_t) {
  Matrix6 m = Matrix6::Zero();
  const double ts[2] = {t_s, t_t};
  for (int e = 0; e < 2; ++e) {
    const double t = ts[e];
    const int r = 3 * e;
    for (int k = 0; k < 6; ++k) {
      m(r, k) = std::pow(t, k);
      if (k >= 1) m(r + 1, k) = k * std::pow(t, k - 1);
      if (k >= 2) m(r + 2, k) = k * (k - 1) * std::pow(t, k - 2);
    }
  }
  return m;
}

BoundarySystem build_system(const BoundaryState& start, const BoundaryState& target,
                            double t_s, double t_t) {
  if (!std::isfinite(t_s) || !std::isfinite(t_t) || !(t_t > t_s)) {
    throw InvalidArgument("degenerate segment interval " + interval_name(t_s, t_t));
  }
  BoundarySystem sys;
  sys.m = boundary_matrix(t_s, t_t);
  sys.b << start.v, start.a, start.j, target.v, target.a, target.j;
  return sys;
}

QuinticSolver::QuinticSolver(const Matrix6& m) {
  if (!m.allFinite()) {
    row_scale_.setOnes();
    col_scale_.setOnes();
    rcond_ = 0.0;
    return;
  }
  // Column scaling absorbs the t^k growth, row scaling the derivative factors.
  Matrix6 scaled = m;
  for (int c = 0; c < 6; ++c) {
    const double mx = scaled.col(c).cwiseAbs().maxCoeff();
    col_scale_(c) = mx > 0.0 ? 1.0 / mx : 1.0;
    scaled.col(c) *= col_scale_(c);
  }
  for (int r = 0; r < 6; ++r) {
    const double mx = scaled.row(r).cwiseAbs().maxCoeff();
    row_scale_(r) = mx > 0.0 ? 1.0 / mx : 1.0;
    scaled.row(r) *= row_scale_(r);
  }
  lu_.compute(scaled);
  rcond_ = lu_.rcond();
  if (!std::isfinite(rcond_)) rcond_ = 0.0;
}

bool QuinticSolver::well_conditioned() const { return rcond_ >= kMinRcond; }

std::array<double, 6> QuinticSolver::solve(const Vector6& b) const {
  if (!well_conditioned()) {
    std::ostringstream os;
    os << "boundary system is singular or ill-conditioned (rcond=" << rcond_ << ")";
    throw NumericalFailure(os.str());
  }
  const Vector6 y = lu_.solve(row_scale_.cwiseProduct(b));
  const Vector6 q = col_scale_.cwiseProduct(y);
  std::array<double, 6> out{};
  for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = q(i);
  return out;
}

std::array<double, 6> solve_coefficients(const Matrix6& m, const Vector6& b) {
  if (!b.allFinite()) throw InvalidArgument("boundary vector is not finite");
  return QuinticSolver(m).solve(b);
}

VelocityTrajectory evaluate_trajectory(const std::array<QuinticSegment, kNumAxes>& segments,
                                       const Timing& timing) {
  const double t_s = segments[0].t_start;
  const double t_t = segments[0].t_end;
  for (const auto& s : segments) {
    if (s.t_start != t_s || s.t_end != t_t) {
      throw InvalidArgument("axis segments do not share an interval");
    }
  }
  VelocityTrajectory traj;
  traj.dt = timing.t_r;
  traj.samples.resize(timing.k);
  for (std::size_t i = 0; i < timing.k; ++i) {
    const double t = t_s + static_cast<double>(i) * timing.t_r;
    for (std::size_t a = 0; a < kNumAxes; ++a) traj.samples[i][a] = segments[a].value(t);
  }
  return traj;
}

double LimitReport::max_ratio() const { return *std::max_element(ratio.begin(), ratio.end()); }

LimitReport check_limits(const VelocityTrajectory& traj, const KinematicLimits& limits) {
  LimitReport rep;
  rep.clamped = traj;
  for (auto& s : rep.clamped.samples) {
    for (std::size_t a = 0; a < kNumAxes; ++a) {
      const double lim = limits.velocity(a);
      rep.ratio[a] = std::max(rep.ratio[a], std::abs(s[a]) / lim);
      s[a] = std::clamp(s[a], -lim, lim);
    }
  }
  return rep;
}

QuinticPlanner::QuinticPlanner(const KinematicLimits& limits, const Timing& timing, bool clamp)
    : limits_(limits),
      timing_(timing),
      clamp_(clamp),
      solver_(boundary_matrix(0.0, timing.t_d)) {
  limits_.validate();
  timing_.validate();
}

std::array<QuinticSegment, kNumAxes> QuinticPlanner::fit(const AxisStates& start,
                                                         const AxisStates& target,
                                                         double t0) const {
  std::optional<QuinticSolver> shifted;
  if (t0 != 0.0) shifted.emplace(boundary_matrix(t0, t0 + timing_.t_d));
  const QuinticSolver& solver = shifted ? *shifted : solver_;

  std::array<QuinticSegment, kNumAxes> segs;
  for (std::size_t a = 0; a < kNumAxes; ++a) {
    Vector6 b;
    b << start[a].v, start[a].a, start[a].j, target[a].v, target[a].a, target[a].j;
    segs[a].coeffs = solver.solve(b);
    segs[a].t_start = t0;
    segs[a].t_end = t0 + timing_.t_d;
  }
  return segs;
}

QuinticPlanner::Cycle QuinticPlanner::plan_at(const FilteredCommand& cmd, double t0) {
  Cycle c;
  c.start = boundary_;
  c.target = map_targets(cmd, limits_);
  c.segments = fit(c.start, c.target, t0);
  c.raw = evaluate_trajectory(c.segments, timing_);
  LimitReport rep = check_limits(c.raw, limits_);
  c.overshoot = rep.ratio;
  c.max_overshoot = rep.max_ratio();
  c.clamped = clamp_ && rep.exceeded();
  c.emitted = c.clamped ? std::move(rep.clamped) : c.raw;
  boundary_ = c.target;
  return c;
}

}  // namespace vservo
