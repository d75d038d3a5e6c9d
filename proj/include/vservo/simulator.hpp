#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "vservo/geometry.hpp"

namespace vservo {

/// Planar end-effector pose relative to the aligned pose. The object sits
/// at the origin with orientation 0, so the pose doubles as the error.
struct RobotState {
  double x = 0.0;    // mm
  double y = 0.0;    // mm
  double phi = 0.0;  // rad, wrapped to (-pi, pi]
  double t = 0.0;    // s

  constexpr bool operator==(const RobotState&) const = default;
};

/// Signs applied to the planned twist before it reaches the robot. With the
/// projection used here the image moves opposite to the camera, so the
/// translational axes default to -1. Flip them to emulate a miscalibrated
/// hand-eye transform.
struct HandEye {
  double sign_x = -1.0;
  double sign_y = -1.0;
  double sign_phi = 1.0;

  void validate() const;
};

/// Fixed-scale orthographic eye-in-hand camera.
struct CameraModel {
  double scale = 10.0;  // px/mm
  double image_width = 1920.0;
  double image_height = 1440.0;
  ImagePoint target{960.0, 720.0};  // desired object position (image center)
  HandEye hand_eye;

  void validate() const;
};

/// Detector imprecision. Outliers displace the center uniformly within a
/// disc of outlier_radius px.
struct NoiseModel {
  double sigma_center = 0.0;  // px
  double sigma_phi = 0.0;     // rad
  double outlier_prob = 0.0;
  double outlier_radius = 0.0;  // px
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimConfig {
  CameraModel camera;
  NoiseModel noise;
  double detection_period = 1.0 / 60.0;   // s
  double control_period = 1.0 / 500.0;    // s
  double detection_latency = 1.0 / 60.0;  // s
  double object_width = 40.0;             // mm
  double object_height = 20.0;            // mm

  void validate() const;
};

/// Explicit Euler step of a Cartesian twist. Velocities in m/s and rad/s.
RobotState robot_step(const RobotState& state, double v_x, double v_y, double omega, double dt);

/// Noise-free image position of the object: target - scale * (x, y).
ImagePoint project_center(const RobotState& state, const CameraModel& camera);

/// Noise-free image orientation of the object relative to the camera.
double project_orientation(const RobotState& state);

/// Ground-truth pixel distance between the object and the target.
double true_pixel_error(const RobotState& state, const CameraModel& camera);

/// One detector frame. Returns nullopt when the (possibly displaced) center
/// falls outside the image. Always consumes the same number of random
/// variates so noise streams do not depend on the trajectory.
std::optional<ObbDetection> camera_observe(const RobotState& state, const SimConfig& config,
                                           std::mt19937_64& rng);

}  // namespace vservo
