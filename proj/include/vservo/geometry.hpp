#pragma once

#include <cmath>
#include <numbers>

namespace vservo {

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Plain 2-vector used for pixel directions and normalized commands.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

/// Pixel coordinates in the image plane.
struct ImagePoint {
  double x = 0.0;
  double y = 0.0;

  constexpr bool operator==(const ImagePoint&) const = default;
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

/// Oriented bounding box as reported by a detector: [x, y, w, h, phi].
struct ObbDetection {
  ImagePoint center;
  double width = 1.0;
  double height = 1.0;
  double phi = 0.0;        // rad, wrapped to (-pi, pi]
  double timestamp = 0.0;  // s, capture time

  /// Throws InvalidArgument when the box violates its invariants.
  void validate() const;
};

/// Vicinities (damping bands) and alignment thresholds for normalization.
struct NormalizationParams {
  double u_r = 500.0;              // px
  double u_phi = deg2rad(10.0);    // rad
  double eps_r = 1.0;              // px
  double eps_phi = deg2rad(1.0);   // rad

  void validate() const;
};

/// Damped unit direction and orientation handed to the planner.
struct NormalizedCommand {
  Vec2 r_n;
  double phi_n = 0.0;
  double timestamp = 0.0;

  constexpr bool operator==(const NormalizedCommand&) const = default;
};

/// r = target - center, componentwise.
Vec2 direction_to_target(const ImagePoint& target, const ImagePoint& center);

/// Piecewise normalization: zero inside eps_r, r/u_r inside the vicinity,
/// r/|r| outside it.
Vec2 normalize_direction(const Vec2& r, const NormalizationParams& params);

/// Scalar analogue of normalize_direction for the orientation error.
double normalize_orientation(double phi, const NormalizationParams& params);

/// Maps any finite angle into (-pi, pi].
double wrap_angle(double phi);

}  // namespace vservo
