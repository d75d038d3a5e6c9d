#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "vservo/geometry.hpp"

namespace vservo {

/// Line format for external detectors, one frame per line:
///
///   timestamp,cx,cy,w,h,phi      detection (s, px, px, px, px, rad)
///   timestamp,lost               no object found in this frame
///
/// Numbers use '.' as decimal separator with an optional exponent and are
/// parsed independently of the process locale. Spaces and tabs around
/// fields are ignored, as is a trailing '\r'. Blank lines and lines
/// starting with '#' carry no frame.
struct StreamFrame {
  double timestamp = 0.0;
  std::optional<ObbDetection> detection;  // nullopt = lost
};

/// Returns nullopt for blank and comment lines; throws ParseError otherwise
/// when the line is malformed.
std::optional<StreamFrame> parse_detection_line(std::string_view line);

/// Inverse of parse_detection_line, with round-trip precision.
std::string format_detection_line(const StreamFrame& frame);

}  // namespace vservo
