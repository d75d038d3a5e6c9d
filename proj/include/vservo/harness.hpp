#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vservo/record.hpp"
#include "vservo/servo_loop.hpp"

namespace vservo {

/// Everything that changes when the method moves to another robot-camera
/// setup. The planner and normalization code never look anywhere else.
struct RobotProfile {
  std::string name = "fast";
  KinematicLimits limits;
  Timing timing;
  CameraModel camera;

  void validate() const;

  /// 60 Hz detection, 500 Hz control.
  static RobotProfile fast();
  /// 30 Hz detection, 250 Hz control, limits at 40% of fast().
  static RobotProfile slow();
  /// "fast" or "slow".
  static RobotProfile builtin(std::string_view name);
};

/// Initial errors: `positions` points on a circle of `radius_mm`, each paired
/// with one rotation error from `angle_errors_deg`.
struct ExperimentGrid {
  std::string name = "small";
  double radius_mm = 35.0;
  std::vector<double> angle_errors_deg;
  std::size_t positions = 11;

  void validate() const;

  static ExperimentGrid small();  // 35 mm, -15..15 deg in 3 deg steps
  static ExperimentGrid large();  // 70 mm, -25..25 deg in 5 deg steps
  static ExperimentGrid builtin(std::string_view name);
};

enum class Scene { kNormal, kClutter };

Scene parse_scene(std::string_view name);
std::string_view scene_name(Scene scene);

/// Default detector model of a scene (sigma 2 px / 1 deg; clutter adds
/// 5% outliers within 100 px).
NoiseModel scene_noise(Scene scene);

/// Per-scene simulation settings that are not part of the robot profile.
struct SceneConfig {
  Scene scene = Scene::kNormal;
  NoiseModel noise = scene_noise(Scene::kNormal);
  std::optional<double> detection_latency;  // default: one detection period
  double object_width = 40.0;               // mm
  double object_height = 20.0;              // mm

  static SceneConfig defaults(Scene scene);
  /// Same scene with every noise source switched off.
  static SceneConfig noiseless(Scene scene = Scene::kNormal);
};

struct Thresholds {
  double pixel = 1.0;    // px
  double degrees = 1.0;  // deg
  bool first_crossing = false;
};

struct EpisodeSummary {
  std::optional<double> t_r;    // s
  std::optional<double> t_phi;  // s
  bool converged = false;
  double mae_x_mm = 0.0;
  double mae_y_mm = 0.0;
  double mae_phi_deg = 0.0;
  std::optional<double> speed_mm_s;   // initial distance / t_r
  std::optional<double> speed_rad_s;  // initial angle / t_phi
  double max_overshoot = 0.0;         // pre-clamp
  std::size_t lost_detections = 0;
  std::size_t numerical_failures = 0;

  bool operator==(const EpisodeSummary&) const = default;
};

/// t_r / t_phi are the first times after which the error stays below the
/// threshold (or first drops below it, with first_crossing). MAE is taken
/// over the rows from max(t_r, t_phi) on; for episodes that never converge
/// it is taken over the final quarter.
EpisodeSummary compute_metrics(const EpisodeRecord& record, const Thresholds& thresholds = {});

/// Initial poses for the grid. With cross_product every angle is combined
/// with every position.
std::vector<RobotState> generate_grid(const ExperimentGrid& grid, bool cross_product = false);

struct SuiteConfig {
  RobotProfile profile = RobotProfile::fast();
  ExperimentGrid grid = ExperimentGrid::small();
  SceneConfig scene = SceneConfig::defaults(Scene::kNormal);
  LoopConfig loop;
  double duration = 20.0;  // s
  std::uint64_t seed = 0;
  bool cross_product = false;
  Thresholds thresholds;
  unsigned jobs = 1;

  void validate() const;
  /// Simulation settings of episode `index` (its noise seed is derived from
  /// the suite seed and the index).
  SimConfig sim_config(std::size_t index) const;
};

struct EpisodeResult {
  std::size_t index = 0;
  RobotState initial;
  EpisodeSummary summary;
  double max_emitted_ratio = 0.0;  // post-clamp max |v| / limit
  EpisodeRecord record;
};

/// Column means in the layout of a results table.
struct SuiteSummary {
  std::size_t episodes = 0;
  std::size_t converged = 0;
  double mae_x_mm = 0.0;
  double mae_y_mm = 0.0;
  double mae_phi_deg = 0.0;
  std::optional<double> t_r;    // mean over converged episodes
  std::optional<double> t_phi;
  double max_overshoot = 0.0;
  double max_emitted_ratio = 0.0;
};

struct SuiteResult {
  std::vector<EpisodeResult> episodes;  // sorted by grid index
  SuiteSummary summary;
};

EpisodeResult run_single(const SuiteConfig& config, std::size_t index, const RobotState& initial);
SuiteResult run_suite(const SuiteConfig& config);
SuiteSummary summarize(const std::vector<EpisodeResult>& episodes);

/// One point of a sensitivity sweep.
struct SweepPoint {
  std::string profile;
  double sigma_center = 0.0;  // px
  double sigma_phi = 0.0;     // rad
  SuiteSummary summary;
};

/// Reruns `base` for every profile and every center-noise level. The
/// orientation noise scales along with sigma_center (1 deg per 2 px, the
/// ratio of the scene defaults).
std::vector<SweepPoint> run_sweep(const SuiteConfig& base, const std::vector<RobotProfile>& profiles,
                                  const std::vector<double>& sigmas_px);

/// Max |v| / limit over the emitted samples of a record.
double emitted_ratio(const EpisodeRecord& record, const KinematicLimits& limits);

}  // namespace vservo
