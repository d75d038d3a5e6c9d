#include "vservo/simulator.hpp"

#include <cmath>

#include "vservo/error.hpp"

namespace vservo {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void HandEye::validate() const {
  for (double s : {sign_x, sign_y, sign_phi}) {
    if (s != 1.0 && s != -1.0) throw InvalidArgument("hand-eye signs must be +1 or -1");
  }
}

void CameraModel::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("camera scale must be > 0");
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw InvalidArgument("image size must be positive");
  }
  if (!target.finite() || target.x < 0.0 || target.y < 0.0 || target.x > image_width ||
      target.y > image_height) {
    throw InvalidArgument("target must lie inside the image");
  }
  hand_eye.validate();
}

void NoiseModel::validate() const {
  if (!finite_nonneg(sigma_center) || !finite_nonneg(sigma_phi) ||
      !finite_nonneg(outlier_radius)) {
    throw InvalidArgument("noise magnitudes must be nonnegative");
  }
  if (!(outlier_prob >= 0.0 && outlier_prob <= 1.0)) {
    throw InvalidArgument("outlier probability must lie in [0, 1]");
  }
}

void SimConfig::validate() const {
  camera.validate();
  noise.validate();
  if (!(detection_period > 0.0) || !(control_period > 0.0) ||
      !std::isfinite(detection_period) || !std::isfinite(control_period)) {
    throw InvalidArgument("simulation periods must be positive");
  }
  if (!finite_nonneg(detection_latency)) {
    throw InvalidArgument("detection latency must be nonnegative");
  }
  if (!(object_width > 0.0) || !(object_height > 0.0)) {
    throw InvalidArgument("object size must be positive");
  }
}

RobotState robot_step(const RobotState& state, double v_x, double v_y, double omega, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("robot_step requires dt > 0");
  RobotState next = state;
  next.x += v_x * 1000.0 * dt;
  next.y += v_y * 1000.0 * dt;
  next.phi = wrap_angle(state.phi + omega * dt);
  next.t += dt;
  return next;
}

ImagePoint project_center(const RobotState& state, const CameraModel& camera) {
  return {camera.target.x - camera.scale * state.x, camera.target.y - camera.scale * state.y};
}

double project_orientation(const RobotState& state) { return wrap_angle(-state.phi); }

double true_pixel_error(const RobotState& state, const CameraModel& camera) {
  return camera.scale * std::hypot(state.x, state.y);
}

std::optional<ObbDetection> camera_observe(const RobotState& state, const SimConfig& config,
                                           std::mt19937_64& rng) {
  const auto& noise = config.noise;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double nx = gauss(rng);
  const double ny = gauss(rng);
  const double nphi = gauss(rng);
  const double u_hit = unit(rng);
  const double u_angle = unit(rng);
  const double u_radius = unit(rng);

  ImagePoint c = project_center(state, config.camera);
  c.x += noise.sigma_center * nx;
  c.y += noise.sigma_center * ny;
  if (u_hit < noise.outlier_prob) {
    // Uniform in the disc: radius ~ R sqrt(u).
    const double rad = noise.outlier_radius * std::sqrt(u_radius);
    const double ang = 2.0 * kPi * u_angle;
    c.x += rad * std::cos(ang);
    c.y += rad * std::sin(ang);
  }

  const auto& cam = config.camera;
  if (c.x < 0.0 || c.y < 0.0 || c.x > cam.image_width || c.y > cam.image_height) {
    return std::nullopt;
  }

  ObbDetection det;
  det.center = c;
  det.width = config.object_width * cam.scale;
  det.height = config.object_height * cam.scale;
  det.phi = wrap_angle(project_orientation(state) + noise.sigma_phi * nphi);
  det.timestamp = state.t;
  return det;
}

}  // namespace vservo
