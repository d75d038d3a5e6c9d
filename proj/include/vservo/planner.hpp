#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "vservo/filter.hpp"

namespace vservo {

/// Planned axes: two translational (x, y) and the rotation about z.
enum Axis : std::size_t { kAxisX = 0, kAxisY = 1, kAxisPhi = 2 };
inline constexpr std::size_t kNumAxes = 3;

/// Per-robot Cartesian maxima. Translational values in m/s, m/s^2, m/s^3;
/// rotational values in rad/s, rad/s^2, rad/s^3.
struct KinematicLimits {
  double v_max = 0.25;
  double a_max = 1.0;
  double j_max = 5.0;
  double omega_max = 1.0;
  double alpha_max = 4.0;
  double zeta_max = 20.0;

  void validate() const;

  double velocity(std::size_t axis) const { return axis == kAxisPhi ? omega_max : v_max; }
  double acceleration(std::size_t axis) const { return axis == kAxisPhi ? alpha_max : a_max; }
  double jerk(std::size_t axis) const { return axis == kAxisPhi ? zeta_max : j_max; }
};

/// Detection cycle, controller cycle and the number of samples per cycle.
struct Timing {
  double t_d = 1.0 / 60.0;
  double t_r = 1.0 / 500.0;
  std::size_t k = 8;

  /// Builds a timing with k = floor(t_d / t_r); throws if t_d < 2 t_r.
  static Timing make(double t_d, double t_r);
  void validate() const;
};

/// Velocity, acceleration and jerk pinned at one end of a segment.
struct BoundaryState {
  double v = 0.0;
  double a = 0.0;
  double j = 0.0;

  constexpr bool operator==(const BoundaryState&) const = default;
};

using AxisStates = std::array<BoundaryState, kNumAxes>;

/// Velocity polynomial a0 + a1 t + ... + a5 t^5 on [t_start, t_end].
struct QuinticSegment {
  std::array<double, 6> coeffs{};
  double t_start = 0.0;
  double t_end = 1.0;

  double value(double t) const { return derivative(t, 0); }
  /// order 0..5; higher orders are zero.
  double derivative(double t, int order) const;
  /// (value, first, second derivative) at t.
  BoundaryState state_at(double t) const;
};

struct TwistSample {
  double v_x = 0.0;    // m/s
  double v_y = 0.0;    // m/s
  double omega = 0.0;  // rad/s

  double operator[](std::size_t axis) const {
    return axis == kAxisX ? v_x : axis == kAxisY ? v_y : omega;
  }
  double& operator[](std::size_t axis) {
    return axis == kAxisX ? v_x : axis == kAxisY ? v_y : omega;
  }
  constexpr bool operator==(const TwistSample&) const = default;
};

/// K samples spaced by dt = T_R.
struct VelocityTrajectory {
  std::vector<TwistSample> samples;
  double dt = 0.0;
};

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

struct BoundarySystem {
  Matrix6 m;
  Vector6 b;
};

/// Scales the filtered command by the limits: v = v_max r, a = a_max r,
/// j = j_max r per axis. Rejects |r| > 1 or |phi| > 1 beyond 1e-9.
AxisStates map_targets(const FilteredCommand& cmd, const KinematicLimits& limits);

/// Monomial rows for value, first and second derivative at t_s then t_t.
Matrix6 boundary_matrix(double t_s, double t_t);

BoundarySystem build_system(const BoundaryState& start, const BoundaryState& target,
                            double t_s, double t_t);

/// LU factorization of a row- and column-equilibrated 6x6 boundary matrix.
/// Factor once, solve many right-hand sides.
class QuinticSolver {
 public:
  explicit QuinticSolver(const Matrix6& m);

  /// Reciprocal condition estimate of the equilibrated matrix.
  double rcond() const { return rcond_; }
  bool well_conditioned() const;

  /// Throws NumericalFailure if the matrix is not well conditioned.
  std::array<double, 6> solve(const Vector6& b) const;

 private:
  Vector6 row_scale_;
  Vector6 col_scale_;
  Eigen::PartialPivLU<Matrix6> lu_;
  double rcond_ = 0.0;
};

/// Solves M q = b. Throws NumericalFailure when the equilibrated matrix has
/// a reciprocal condition estimate below 1e-12.
std::array<double, 6> solve_coefficients(const Matrix6& m, const Vector6& b);

/// Samples every axis at t_start + i * T_R for i in [0, K).
VelocityTrajectory evaluate_trajectory(const std::array<QuinticSegment, kNumAxes>& segments,
                                       const Timing& timing);

struct LimitReport {
  std::array<double, kNumAxes> ratio{};  // max |v| / limit per axis
  VelocityTrajectory clamped;

  double max_ratio() const;
  bool exceeded() const { return max_ratio() > 1.0; }
};

LimitReport check_limits(const VelocityTrajectory& traj, const KinematicLimits& limits);

/// Pre-factored quintic planner for the fixed interval [0, T_D].
///
/// Each call to plan() fits one quintic per axis between the current
/// boundary and the mapped targets, samples it K times and then moves the
/// boundary to the targets, so consecutive segments join with matching
/// velocity, acceleration and jerk.
class QuinticPlanner {
 public:
  struct Cycle {
    std::array<QuinticSegment, kNumAxes> segments;
    AxisStates start;
    AxisStates target;
    VelocityTrajectory raw;      // before clamping
    VelocityTrajectory emitted;  // after clamping (if enabled and needed)
    std::array<double, kNumAxes> overshoot{};
    double max_overshoot = 0.0;
    bool clamped = false;
  };

  QuinticPlanner(const KinematicLimits& limits, const Timing& timing, bool clamp = true);

  /// Throws NumericalFailure (boundary untouched) if the system cannot be solved.
  Cycle plan(const FilteredCommand& cmd) { return plan_at(cmd, 0.0); }

  /// Plans on [t0, t0 + T_D]. Any t0 other than 0 refactors the matrix.
  Cycle plan_at(const FilteredCommand& cmd, double t0);

  /// Fits from explicit boundaries without touching the planner state.
  std::array<QuinticSegment, kNumAxes> fit(const AxisStates& start, const AxisStates& target,
                                           double t0 = 0.0) const;

  const AxisStates& boundary() const { return boundary_; }
  void set_boundary(const AxisStates& b) { boundary_ = b; }
  void reset() { boundary_ = AxisStates{}; }

  const KinematicLimits& limits() const { return limits_; }
  const Timing& timing() const { return timing_; }
  bool clamp_enabled() const { return clamp_; }

 private:
  KinematicLimits limits_;
  Timing timing_;
  bool clamp_;
  AxisStates boundary_{};
  QuinticSolver solver_;
};

}  // namespace vservo
