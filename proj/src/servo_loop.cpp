#include "vservo/servo_loop.hpp"

#include <cmath>
#include <deque>
#include <iostream>

#include "vservo/error.hpp"

namespace vservo {

namespace {

// Tolerance for comparing event times built from different periods.
constexpr double kTimeEps = 1e-9;

VelocityTrajectory ramp_to_zero(const AxisStates& from, const Timing& timing) {
  VelocityTrajectory traj;
  traj.dt = timing.t_r;
  traj.samples.resize(timing.k);
  const double last = static_cast<double>(timing.k - 1);
  for (std::size_t i = 0; i < timing.k; ++i) {
    const double w = 1.0 - static_cast<double>(i) / last;
    for (std::size_t a = 0; a < kNumAxes; ++a) traj.samples[i][a] = w * from[a].v;
  }
  return traj;
}

}  // namespace

void LoopConfig::validate() const {
  normalization.validate();
  if (filter_size == 0) throw InvalidArgument("filter size must be at least 1");
  if (lost_hold_cycles < 0) throw InvalidArgument("lost_hold_cycles must be nonnegative");
}

std::optional<NormalizedCommand> detection_tick(const std::optional<ObbDetection>& detection,
                                                const ImagePoint& target,
                                                const NormalizationParams& params) {
  if (!detection) return std::nullopt;
  detection->validate();
  const Vec2 r = direction_to_target(target, detection->center);
  NormalizedCommand cmd;
  cmd.r_n = normalize_direction(r, params);
  cmd.phi_n = normalize_orientation(wrap_angle(detection->phi), params);
  cmd.timestamp = detection->timestamp;
  return cmd;
}

ServoLoop::ServoLoop(const KinematicLimits& limits, const Timing& timing,
                     const LoopConfig& config)
    : limits_(limits),
      timing_(timing),
      config_(config),
      planner_(limits, timing, config.clamp),
      state_{NormalizedCommand{}, false, 0, MovingAverageFilter(config.filter_size), {}, 0} {
  config_.validate();
}

void ServoLoop::on_detection(const std::optional<ObbDetection>& detection,
                             const ImagePoint& target) {
  if (auto cmd = detection_tick(detection, target, config_.normalization)) {
    submit(*cmd);
  } else {
    report_lost(std::nan(""));
  }
}

void ServoLoop::submit(const NormalizedCommand& cmd) {
  state_.latest_cmd = cmd;
  state_.has_detection = true;
  state_.lost_count = 0;
}

void ServoLoop::report_lost(double timestamp) {
  ++state_.lost_count;
  if (state_.lost_count > config_.lost_hold_cycles) {
    state_.latest_cmd.r_n = {};
    state_.latest_cmd.phi_n = 0.0;
    if (std::isfinite(timestamp)) state_.latest_cmd.timestamp = timestamp;
  }
}

CycleOutput ServoLoop::control_cycle() {
  CycleOutput out;
  out.command = state_.latest_cmd;
  state_.filter.push(state_.latest_cmd);
  out.filtered = state_.filter.mean();

  out.log.index = state_.cycle_index;
  if (state_.has_detection) out.log.command_timestamp = state_.latest_cmd.timestamp;

  const double t0 = config_.time_origin == TimeOrigin::kAbsolute
                        ? static_cast<double>(state_.cycle_index) * timing_.t_d
                        : 0.0;
  try {
    auto cycle = planner_.plan_at(out.filtered, t0);
    out.trajectory = std::move(cycle.emitted);
    out.log.segments = cycle.segments;
    out.log.start = cycle.start;
    out.log.target = cycle.target;
    out.log.max_overshoot = cycle.max_overshoot;
    out.log.clamped = cycle.clamped;
  } catch (const NumericalFailure&) {
    out.log.start = planner_.boundary();
    out.trajectory = ramp_to_zero(planner_.boundary(), timing_);
    out.log.numerical_failure = true;
    planner_.reset();
  }
  state_.planner_boundary = planner_.boundary();
  ++state_.cycle_index;
  return out;
}

EpisodeRecord run_episode(const SimConfig& sim, const KinematicLimits& limits,
                          const Timing& timing, const RobotState& initial, double duration,
                          const LoopConfig& loop_config) {
  sim.validate();
  limits.validate();
  timing.validate();
  if (!(duration > 0.0)) throw InvalidArgument("episode duration must be positive");
  if (std::abs(sim.detection_period - timing.t_d) > kTimeEps ||
      std::abs(sim.control_period - timing.t_r) > kTimeEps) {
    throw InvalidArgument("simulation periods disagree with the planner timing");
  }

  ServoLoop loop(limits, timing, loop_config);
  std::mt19937_64 rng(sim.noise.seed);
  const auto& cam = sim.camera;
  const auto& he = cam.hand_eye;

  struct Pending {
    std::optional<ObbDetection> detection;
    double captured = 0.0;
    double available = 0.0;
  };
  std::deque<Pending> pending;

  EpisodeRecord rec;
  rec.initial = initial;
  rec.scale = cam.scale;

  const auto ticks = static_cast<std::size_t>(std::ceil(duration / timing.t_r - kTimeEps));
  rec.rows.reserve(ticks);

  RobotState state = initial;
  state.t = 0.0;
  RobotState prev_state = state;
  TwistSample prev_twist;
  std::size_t next_capture = 0;
  std::size_t next_cycle = 0;
  std::size_t cycle_tick = 0;
  VelocityTrajectory active;
  double active_overshoot = 0.0;

  for (std::size_t m = 0; m < ticks; ++m) {
    const double t = static_cast<double>(m) * timing.t_r;
    state.t = t;

    // Frames captured in (t_{m-1}, t_m].
    while (true) {
      const double c = static_cast<double>(next_capture) * timing.t_d;
      if (c > t + kTimeEps || c >= duration) break;
      RobotState at = state;
      if (m > 0 && c < t - kTimeEps) {
        at = robot_step(prev_state, prev_twist.v_x, prev_twist.v_y, prev_twist.omega,
                        c - prev_state.t);
      }
      at.t = c;
      auto det = camera_observe(at, sim, rng);
      DetectionLog dl;
      dl.t_capture = c;
      dl.t_available = c + sim.detection_latency;
      dl.lost = !det.has_value();
      dl.true_pixel_error = true_pixel_error(at, cam);
      if (det) dl.detected_pixel_error = direction_to_target(cam.target, det->center).norm();
      rec.detections.push_back(dl);
      pending.push_back({det, c, dl.t_available});
      ++next_capture;
    }

    while (!pending.empty() && pending.front().available <= t + kTimeEps) {
      const Pending& p = pending.front();
      if (auto cmd = detection_tick(p.detection, cam.target, loop.config().normalization)) {
        loop.submit(*cmd);
      } else {
        loop.report_lost(p.captured);
      }
      pending.pop_front();
    }

    const double cycle_time = static_cast<double>(next_cycle) * timing.t_d;
    if (t + kTimeEps >= cycle_time) {
      CycleOutput out = loop.control_cycle();
      out.log.t_start = t;
      out.log.first_tick = m;
      active = std::move(out.trajectory);
      active_overshoot = out.log.max_overshoot;
      rec.cycles.push_back(std::move(out.log));
      cycle_tick = m;
      ++next_cycle;
    }

    // Ticks past the K-th sample hold the last one.
    const std::size_t idx = std::min(m - cycle_tick, active.samples.size() - 1);
    const TwistSample& s = active.samples[idx];

    EpisodeRow row;
    row.t = t;
    row.rn_x = loop.state().latest_cmd.r_n.x;
    row.rn_y = loop.state().latest_cmd.r_n.y;
    row.phi_n = loop.state().latest_cmd.phi_n;
    row.pixel_error = true_pixel_error(state, cam);
    row.err_x_mm = state.x;
    row.err_y_mm = state.y;
    row.err_phi_deg = rad2deg(state.phi);
    row.v_x = s.v_x;
    row.v_y = s.v_y;
    row.omega = s.omega;
    row.overshoot = active_overshoot;
    rec.rows.push_back(row);

    const TwistSample twist{he.sign_x * s.v_x, he.sign_y * s.v_y, he.sign_phi * s.omega};
    prev_state = state;
    prev_twist = twist;
    state = robot_step(state, twist.v_x, twist.v_y, twist.omega, timing.t_r);
  }
  rec.final_state = state;
  return rec;
}

RealtimeRunner::RealtimeRunner(const KinematicLimits& limits, const Timing& timing,
                               const LoopConfig& config, Sink sink)
    : loop_(limits, timing, config), timing_(timing), sink_(std::move(sink)) {}

RealtimeRunner::~RealtimeRunner() { stop(); }

void RealtimeRunner::start() {
  if (running_.exchange(true)) return;
  worker_ = std::thread([this] { run(); });
}

void RealtimeRunner::stop() {
  running_ = false;
  if (worker_.joinable()) worker_.join();
}

void RealtimeRunner::submit(const NormalizedCommand& cmd) {
  std::lock_guard lock(slot_mutex_);
  pending_ = cmd;
  pending_lost_.reset();
}

void RealtimeRunner::report_lost(double timestamp) {
  std::lock_guard lock(slot_mutex_);
  pending_.reset();
  pending_lost_ = timestamp;
}

void RealtimeRunner::run() {
  using clock = std::chrono::steady_clock;
  const auto t_r = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(timing_.t_r));
  const auto t_d = std::chrono::duration<double>(timing_.t_d);
  const auto origin = clock::now();
  TwistSample last;

  for (std::size_t n = 0; running_; ++n) {
    const auto cycle_start =
        origin + std::chrono::duration_cast<clock::duration>(t_d * static_cast<double>(n));
    std::this_thread::sleep_until(cycle_start);
    {
      std::lock_guard lock(slot_mutex_);
      if (pending_) loop_.submit(*pending_);
      if (pending_lost_) loop_.report_lost(*pending_lost_);
      pending_.reset();
      pending_lost_.reset();
    }
    const auto before = clock::now();
    CycleOutput out = loop_.control_cycle();
    ++cycles_;
    const auto next_cycle =
        origin + std::chrono::duration_cast<clock::duration>(t_d * static_cast<double>(n + 1));

    auto tick = cycle_start;
    if (clock::now() - before > t_r) {
      // Planning overran one controller period: repeat the previous sample.
      ++overruns_;
      std::cerr << "vservo: planning cycle " << n << " overran T_R\n";
      sink_(std::chrono::duration<double>(clock::now() - origin).count(), last);
      tick += t_r;
    }
    for (const auto& s : out.trajectory.samples) {
      if (!running_ || tick >= next_cycle) break;
      std::this_thread::sleep_until(tick);
      sink_(std::chrono::duration<double>(tick - origin).count(), s);
      last = s;
      tick += t_r;
    }
  }
}

}  // namespace vservo
