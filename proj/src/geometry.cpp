#include "vservo/geometry.hpp"

#include <string>

#include "vservo/error.hpp"

namespace vservo {

void ObbDetection::validate() const {
  if (!center.finite()) throw InvalidArgument("detection center is not finite");
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw InvalidArgument("detection width and height must be positive");
  }
  if (!std::isfinite(phi) || !std::isfinite(timestamp)) {
    throw InvalidArgument("detection phi and timestamp must be finite");
  }
}

void NormalizationParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v); };
  if (!ok(u_r) || !ok(u_phi) || !ok(eps_r) || !ok(eps_phi)) {
    throw InvalidArgument("normalization parameters must be finite");
  }
  if (!(eps_r >= 0.0) || !(u_r > eps_r)) {
    throw InvalidArgument("normalization requires u_r > eps_r >= 0, got u_r=" +
                          std::to_string(u_r) + " eps_r=" + std::to_string(eps_r));
  }
  if (!(eps_phi >= 0.0) || !(u_phi > eps_phi)) {
    throw InvalidArgument("normalization requires u_phi > eps_phi >= 0, got u_phi=" +
                          std::to_string(u_phi) + " eps_phi=" + std::to_string(eps_phi));
  }
}

Vec2 direction_to_target(const ImagePoint& target, const ImagePoint& center) {
  return {target.x - center.x, target.y - center.y};
}

Vec2 normalize_direction(const Vec2& r, const NormalizationParams& params) {
  const double n = r.norm();
  if (n <= params.eps_r) return {};
  if (n >= params.u_r) return r / n;
  return r / params.u_r;
}

double normalize_orientation(double phi, const NormalizationParams& params) {
  const double a = std::abs(phi);
  if (a <= params.eps_phi) return 0.0;
  if (a >= params.u_phi) return phi > 0.0 ? 1.0 : -1.0;
  return phi / params.u_phi;
}

double wrap_angle(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

}  // namespace vservo
