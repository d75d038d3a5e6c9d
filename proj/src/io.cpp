#include "vservo/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "vservo/error.hpp"

namespace vservo::io {

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("bad number '" + std::string(s) + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RobotProfile profile_from_json(const json& j) {
  reject_unknown(j, {"name", "limits", "timing", "camera"}, "profile");
  RobotProfile p = RobotProfile::fast();
  read(j, "name", p.name, "profile");
  if (j.contains("limits")) {
    const auto& l = j["limits"];
    reject_unknown(l, {"v_max", "a_max", "j_max", "omega_max", "alpha_max", "zeta_max"},
                   "profile.limits");
    read(l, "v_max", p.limits.v_max, "profile.limits");
    read(l, "a_max", p.limits.a_max, "profile.limits");
    read(l, "j_max", p.limits.j_max, "profile.limits");
    read(l, "omega_max", p.limits.omega_max, "profile.limits");
    read(l, "alpha_max", p.limits.alpha_max, "profile.limits");
    read(l, "zeta_max", p.limits.zeta_max, "profile.limits");
  }
  if (j.contains("timing")) {
    const auto& t = j["timing"];
    reject_unknown(t, {"t_d", "t_r"}, "profile.timing");
    double t_d = p.timing.t_d, t_r = p.timing.t_r;
    read(t, "t_d", t_d, "profile.timing");
    read(t, "t_r", t_r, "profile.timing");
    try {
      p.timing = Timing::make(t_d, t_r);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("profile.timing: ") + e.what());
    }
  }
  if (j.contains("camera")) {
    const auto& c = j["camera"];
    reject_unknown(c, {"scale", "image_width", "image_height", "target", "hand_eye"},
                   "profile.camera");
    read(c, "scale", p.camera.scale, "profile.camera");
    read(c, "image_width", p.camera.image_width, "profile.camera");
    read(c, "image_height", p.camera.image_height, "profile.camera");
    if (c.contains("target")) {
      reject_unknown(c["target"], {"x", "y"}, "profile.camera.target");
      read(c["target"], "x", p.camera.target.x, "profile.camera.target");
      read(c["target"], "y", p.camera.target.y, "profile.camera.target");
    }
    if (c.contains("hand_eye")) {
      const auto& h = c["hand_eye"];
      reject_unknown(h, {"sign_x", "sign_y", "sign_phi"}, "profile.camera.hand_eye");
      read(h, "sign_x", p.camera.hand_eye.sign_x, "profile.camera.hand_eye");
      read(h, "sign_y", p.camera.hand_eye.sign_y, "profile.camera.hand_eye");
      read(h, "sign_phi", p.camera.hand_eye.sign_phi, "profile.camera.hand_eye");
    }
  }
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  return p;
}

json to_json(const RobotProfile& p) {
  const auto& l = p.limits;
  const auto& c = p.camera;
  return {
      {"name", p.name},
      {"limits",
       {{"v_max", l.v_max}, {"a_max", l.a_max}, {"j_max", l.j_max},
        {"omega_max", l.omega_max}, {"alpha_max", l.alpha_max}, {"zeta_max", l.zeta_max}}},
      {"timing", {{"t_d", p.timing.t_d}, {"t_r", p.timing.t_r}}},
      {"camera",
       {{"scale", c.scale},
        {"image_width", c.image_width},
        {"image_height", c.image_height},
        {"target", {{"x", c.target.x}, {"y", c.target.y}}},
        {"hand_eye",
         {{"sign_x", c.hand_eye.sign_x},
          {"sign_y", c.hand_eye.sign_y},
          {"sign_phi", c.hand_eye.sign_phi}}}}},
  };
}

RobotProfile load_profile(const std::filesystem::path& path) {
  return profile_from_json(read_json_file(path));
}

SceneConfig scene_from_json(const json& j) {
  reject_unknown(j, {"scene", "noise", "detection_latency", "object"}, "scene");
  std::string name = "normal";
  read(j, "scene", name, "scene");
  SceneConfig s = SceneConfig::defaults(parse_scene(name));
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    reject_unknown(n, {"sigma_center", "sigma_phi", "outlier_prob", "outlier_radius"},
                   "scene.noise");
    read(n, "sigma_center", s.noise.sigma_center, "scene.noise");
    read(n, "sigma_phi", s.noise.sigma_phi, "scene.noise");
    read(n, "outlier_prob", s.noise.outlier_prob, "scene.noise");
    read(n, "outlier_radius", s.noise.outlier_radius, "scene.noise");
  }
  if (j.contains("detection_latency")) {
    double lat = 0.0;
    read(j, "detection_latency", lat, "scene");
    s.detection_latency = lat;
  }
  if (j.contains("object")) {
    reject_unknown(j["object"], {"width", "height"}, "scene.object");
    read(j["object"], "width", s.object_width, "scene.object");
    read(j["object"], "height", s.object_height, "scene.object");
  }
  try {
    s.noise.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  return s;
}

json to_json(const SceneConfig& s) {
  json j = {
      {"scene", std::string(scene_name(s.scene))},
      {"noise",
       {{"sigma_center", s.noise.sigma_center},
        {"sigma_phi", s.noise.sigma_phi},
        {"outlier_prob", s.noise.outlier_prob},
        {"outlier_radius", s.noise.outlier_radius}}},
      {"object", {{"width", s.object_width}, {"height", s.object_height}}},
  };
  if (s.detection_latency) j["detection_latency"] = *s.detection_latency;
  return j;
}

SceneConfig load_scene(const std::filesystem::path& path) {
  return scene_from_json(read_json_file(path));
}

ExperimentGrid grid_from_json(const json& j) {
  reject_unknown(j, {"name", "radius_mm", "angle_errors_deg", "positions"}, "grid");
  ExperimentGrid g = ExperimentGrid::small();
  g.name = "custom";
  read(j, "name", g.name, "grid");
  read(j, "radius_mm", g.radius_mm, "grid");
  read(j, "angle_errors_deg", g.angle_errors_deg, "grid");
  read(j, "positions", g.positions, "grid");
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  return g;
}

json to_json(const ExperimentGrid& g) {
  return {{"name", g.name},
          {"radius_mm", g.radius_mm},
          {"angle_errors_deg", g.angle_errors_deg},
          {"positions", g.positions}};
}

ExperimentGrid load_grid(const std::filesystem::path& path) {
  return grid_from_json(read_json_file(path));
}

LoopConfig loop_from_json(const json& j) {
  reject_unknown(j, {"u_r", "u_phi", "eps_r", "eps_phi", "filter_size", "clamp",
                     "lost_hold_cycles"},
                 "servo");
  LoopConfig l;
  read(j, "u_r", l.normalization.u_r, "servo");
  read(j, "u_phi", l.normalization.u_phi, "servo");
  read(j, "eps_r", l.normalization.eps_r, "servo");
  read(j, "eps_phi", l.normalization.eps_phi, "servo");
  read(j, "filter_size", l.filter_size, "servo");
  read(j, "clamp", l.clamp, "servo");
  read(j, "lost_hold_cycles", l.lost_hold_cycles, "servo");
  try {
    l.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("servo: ") + e.what());
  }
  return l;
}

json to_json(const LoopConfig& l) {
  return {{"u_r", l.normalization.u_r},
          {"u_phi", l.normalization.u_phi},
          {"eps_r", l.normalization.eps_r},
          {"eps_phi", l.normalization.eps_phi},
          {"filter_size", l.filter_size},
          {"clamp", l.clamp},
          {"lost_hold_cycles", l.lost_hold_cycles}};
}

LoopConfig load_loop(const std::filesystem::path& path) {
  return loop_from_json(read_json_file(path));
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw IoError("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void write_episode_csv(std::ostream& os, const EpisodeRecord& record) {
  os << kEpisodeHeader << '\n';
  for (const auto& r : record.rows) {
    const double fields[] = {r.t,        r.rn_x,     r.rn_y,        r.phi_n,
                             r.pixel_error, r.err_x_mm, r.err_y_mm, r.err_phi_deg,
                             r.v_x,      r.v_y,      r.omega,       r.overshoot};
    bool first = true;
    for (double f : fields) {
      if (!first) os << ',';
      os << format_double(f);
      first = false;
    }
    os << '\n';
  }
}

void write_episode_csv(const std::filesystem::path& path, const EpisodeRecord& record) {
  auto os = open_out(path);
  write_episode_csv(os, record);
}

std::vector<EpisodeRow> read_episode_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kEpisodeHeader) {
    throw ParseError("episode CSV header mismatch");
  }
  std::vector<EpisodeRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 12> f{};
    std::size_t start = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::size_t comma = line.find(',', start);
      const bool last = i + 1 == f.size();
      if ((comma == std::string::npos) != last) throw ParseError("episode CSV field count");
      f[i] = parse_double(std::string_view(line).substr(start, last ? std::string::npos
                                                                    : comma - start));
      start = comma + 1;
    }
    rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9], f[10], f[11]});
  }
  return rows;
}

void write_summary_csv(std::ostream& os, const SuiteResult& result) {
  os << kSummaryHeader << '\n';
  for (const auto& e : result.episodes) {
    const auto& s = e.summary;
    os << e.index << ',' << format_double(e.initial.x) << ',' << format_double(e.initial.y)
       << ',' << format_double(rad2deg(e.initial.phi)) << ',' << (s.converged ? 1 : 0) << ','
       << format_double(s.mae_x_mm) << ',' << format_double(s.mae_y_mm) << ','
       << format_double(s.mae_phi_deg) << ',' << format_optional(s.t_r) << ','
       << format_optional(s.t_phi) << ',' << format_optional(s.speed_mm_s) << ','
       << format_optional(s.speed_rad_s) << ',' << format_double(s.max_overshoot) << ','
       << format_double(e.max_emitted_ratio) << ',' << s.lost_detections << ','
       << s.numerical_failures << '\n';
  }
  const auto& m = result.summary;
  os << "mean,,,," << m.converged << ',' << format_double(m.mae_x_mm) << ','
     << format_double(m.mae_y_mm) << ',' << format_double(m.mae_phi_deg) << ','
     << format_optional(m.t_r) << ',' << format_optional(m.t_phi) << ",,,"
     << format_double(m.max_overshoot) << ',' << format_double(m.max_emitted_ratio) << ",,\n";
}

void write_table_csv(std::ostream& os, const SuiteConfig& config, const SuiteResult& result) {
  const auto& m = result.summary;
  os << "metric," << config.profile.name << '/' << config.grid.name << '/'
     << scene_name(config.scene.scene) << '\n';
  os << "dx_mm," << format_double(m.mae_x_mm) << '\n';
  os << "dy_mm," << format_double(m.mae_y_mm) << '\n';
  os << "dphi_deg," << format_double(m.mae_phi_deg) << '\n';
  os << "t_r_s," << format_optional(m.t_r) << '\n';
  os << "t_phi_s," << format_optional(m.t_phi) << '\n';
  os << "converged," << m.converged << '/' << m.episodes << '\n';
}

json manifest(const SuiteConfig& config, const std::string& command) {
  json cfg = {
      {"profile", to_json(config.profile)},
      {"grid", to_json(config.grid)},
      {"scene", to_json(config.scene)},
      {"servo", to_json(config.loop)},
      {"duration", config.duration},
      {"seed", config.seed},
      {"cross_product", config.cross_product},
      {"thresholds",
       {{"pixel", config.thresholds.pixel},
        {"degrees", config.thresholds.degrees},
        {"first_crossing", config.thresholds.first_crossing}}},
  };
  json m = {{"tool", "vservo"}, {"command", command}, {"config", cfg}};
  m["config_hash"] = config_hash(cfg);
  return m;
}

std::string config_hash(const json& canonical) {
  const std::string s = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

void write_suite(const std::filesystem::path& dir, const SuiteConfig& config,
                 const SuiteResult& result, const std::string& command) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "episodes", ec);
  if (ec) throw IoError("cannot create " + (dir / "episodes").string() + ": " + ec.message());
  {
    auto os = open_out(dir / "summary.csv");
    write_summary_csv(os, result);
  }
  {
    auto os = open_out(dir / "table.csv");
    write_table_csv(os, config, result);
  }
  {
    auto os = open_out(dir / "manifest.json");
    os << manifest(config, command).dump(2) << '\n';
  }
  for (const auto& e : result.episodes) {
    char name[32];
    std::snprintf(name, sizeof name, "episode_%03zu.csv", e.index);
    write_episode_csv(dir / "episodes" / name, e.record);
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << kSweepHeader << '\n';
  for (const auto& p : points) {
    const auto& m = p.summary;
    os << p.profile << ',' << format_double(p.sigma_center) << ','
       << format_double(rad2deg(p.sigma_phi)) << ',' << m.episodes << ',' << m.converged << ','
       << format_double(m.mae_x_mm) << ',' << format_double(m.mae_y_mm) << ','
       << format_double(m.mae_phi_deg) << ',' << format_optional(m.t_r) << ','
       << format_optional(m.t_phi) << ',' << format_double(m.max_overshoot) << ','
       << format_double(m.max_emitted_ratio) << '\n';
  }
}

}  // namespace vservo::io
