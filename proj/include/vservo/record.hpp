#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "vservo/planner.hpp"
#include "vservo/simulator.hpp"

namespace vservo {

/// One controller tick of an episode. Errors are ground truth, taken from
/// the simulated pose at the start of the tick.
struct EpisodeRow {
  double t = 0.0;            // s
  double rn_x = 0.0;         // latest normalized command
  double rn_y = 0.0;
  double phi_n = 0.0;
  double pixel_error = 0.0;  // px
  double err_x_mm = 0.0;
  double err_y_mm = 0.0;
  double err_phi_deg = 0.0;
  double v_x = 0.0;          // emitted planner output, m/s
  double v_y = 0.0;
  double omega = 0.0;        // rad/s
  double overshoot = 0.0;    // pre-clamp max |v|/limit of the active cycle
};

/// One planning cycle.
struct CycleLog {
  std::size_t index = 0;
  double t_start = 0.0;      // simulated time of the first sample
  std::size_t first_tick = 0;
  std::array<QuinticSegment, kNumAxes> segments;
  AxisStates start{};
  AxisStates target{};
  double max_overshoot = 0.0;
  bool clamped = false;
  bool numerical_failure = false;
  std::optional<double> command_timestamp;  // capture time behind the command used
};

/// One detector frame.
struct DetectionLog {
  double t_capture = 0.0;
  double t_available = 0.0;
  bool lost = false;
  double true_pixel_error = 0.0;
  double detected_pixel_error = 0.0;
};

struct EpisodeRecord {
  RobotState initial;
  double scale = 10.0;  // px/mm, used to recompute pixel errors
  std::vector<EpisodeRow> rows;
  std::vector<CycleLog> cycles;
  std::vector<DetectionLog> detections;
  RobotState final_state;
};

}  // namespace vservo
