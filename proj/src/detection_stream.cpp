#include "vservo/detection_stream.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <vector>

#include "vservo/error.hpp"
#include "vservo/io.hpp"

namespace vservo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double number(std::string_view field, const char* name) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v, std::chars_format::general);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(std::string("detection line: bad ") + name + " '" + std::string(field) +
                     "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError(std::string("detection line: ") + name + " is not finite");
  }
  return v;
}

}  // namespace

std::optional<StreamFrame> parse_detection_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::string_view body = trim(line);
  if (body.empty() || body.front() == '#') return std::nullopt;

  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = body.find(',', start);
    fields.push_back(trim(body.substr(start, comma == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }

  StreamFrame frame;
  if (fields.size() == 2 && fields[1] == "lost") {
    frame.timestamp = number(fields[0], "timestamp");
    return frame;
  }
  if (fields.size() != 6) {
    throw ParseError("detection line: expected 6 fields, got " + std::to_string(fields.size()));
  }
  static constexpr std::array<const char*, 6> kNames = {"timestamp", "cx", "cy", "w", "h", "phi"};
  std::array<double, 6> v{};
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = number(fields[i], kNames[i]);
  if (!(v[3] > 0.0) || !(v[4] > 0.0)) throw ParseError("detection line: w and h must be > 0");

  ObbDetection det;
  det.timestamp = v[0];
  det.center = {v[1], v[2]};
  det.width = v[3];
  det.height = v[4];
  det.phi = wrap_angle(v[5]);
  frame.timestamp = v[0];
  frame.detection = det;
  return frame;
}

std::string format_detection_line(const StreamFrame& frame) {
  using io::format_double;
  if (!frame.detection) return format_double(frame.timestamp) + ",lost";
  const auto& d = *frame.detection;
  return format_double(frame.timestamp) + ',' + format_double(d.center.x) + ',' +
         format_double(d.center.y) + ',' + format_double(d.width) + ',' +
         format_double(d.height) + ',' + format_double(d.phi);
}

}  // namespace vservo
