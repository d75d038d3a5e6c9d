#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "vservo/filter.hpp"
#include "vservo/geometry.hpp"
#include "vservo/planner.hpp"
#include "vservo/record.hpp"
#include "vservo/simulator.hpp"

namespace vservo {

/// Where each planning cycle puts its time origin.
enum class TimeOrigin {
  kCycleStart,  // every cycle on [0, T_D]; the boundary matrix is factored once
  kAbsolute,    // cycle n on [n T_D, (n+1) T_D]; ill-conditioned for large n
};

struct LoopConfig {
  NormalizationParams normalization;
  std::size_t filter_size = 5;
  bool clamp = true;
  int lost_hold_cycles = 3;  // lost frames tolerated before commanding zero
  TimeOrigin time_origin = TimeOrigin::kCycleStart;

  void validate() const;
};

/// Detection side of the loop. nullopt in, nullopt out (hold marker).
std::optional<NormalizedCommand> detection_tick(const std::optional<ObbDetection>& detection,
                                                const ImagePoint& target,
                                                const NormalizationParams& params);

struct LoopState {
  NormalizedCommand latest_cmd;
  bool has_detection = false;
  int lost_count = 0;
  MovingAverageFilter filter;
  AxisStates planner_boundary{};
  std::size_t cycle_index = 0;
};

struct CycleOutput {
  VelocityTrajectory trajectory;  // what goes to the robot
  FilteredCommand filtered;
  NormalizedCommand command;      // command pushed into the filter
  CycleLog log;
};

/// Planning side of the loop plus the latest-command slot.
class ServoLoop {
 public:
  ServoLoop(const KinematicLimits& limits, const Timing& timing, const LoopConfig& config = {});

  /// Applies a detection result (nullopt = lost) to the latest-command slot.
  void on_detection(const std::optional<ObbDetection>& detection, const ImagePoint& target);
  void submit(const NormalizedCommand& cmd);
  void report_lost(double timestamp);

  /// One iteration of the trajectory planner: push, average, map, solve,
  /// sample, clamp, chain. A numerical failure yields a linear ramp to zero
  /// and resets the boundary.
  CycleOutput control_cycle();

  const LoopState& state() const { return state_; }
  const QuinticPlanner& planner() const { return planner_; }
  const LoopConfig& config() const { return config_; }

 private:
  KinematicLimits limits_;
  Timing timing_;
  LoopConfig config_;
  QuinticPlanner planner_;
  LoopState state_;
};

/// Deterministic closed-loop simulation in lockstep simulated time.
EpisodeRecord run_episode(const SimConfig& sim, const KinematicLimits& limits,
                          const Timing& timing, const RobotState& initial, double duration,
                          const LoopConfig& loop = {});

/// Wall-clock runner: a planner thread emits one sample every T_R and
/// starts a new cycle every T_D, reading whatever command was submitted
/// last. Submissions may come from any single producer thread.
class RealtimeRunner {
 public:
  using Sink = std::function<void(double t, const TwistSample&)>;

  RealtimeRunner(const KinematicLimits& limits, const Timing& timing, const LoopConfig& config,
                 Sink sink);
  ~RealtimeRunner();

  RealtimeRunner(const RealtimeRunner&) = delete;
  RealtimeRunner& operator=(const RealtimeRunner&) = delete;

  void start();
  void stop();

  void submit(const NormalizedCommand& cmd);
  void report_lost(double timestamp);

  std::size_t cycles() const { return cycles_.load(); }
  std::size_t overruns() const { return overruns_.load(); }

 private:
  void run();

  ServoLoop loop_;
  Timing timing_;
  Sink sink_;
  std::mutex slot_mutex_;
  std::optional<NormalizedCommand> pending_;
  std::optional<double> pending_lost_;
  std::atomic<bool> running_{false};
  std::atomic<std::size_t> cycles_{0};
  std::atomic<std::size_t> overruns_{0};
  std::thread worker_;
};

}  // namespace vservo
