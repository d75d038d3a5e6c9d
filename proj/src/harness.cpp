#include "vservo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "vservo/error.hpp"

namespace vservo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> arange(double from, double to, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::lround((to - from) / step));
  for (int i = 0; i <= n; ++i) out.push_back(from + step * i);
  return out;
}

// Index of the first row from which pred holds for every remaining row.
template <typename Pred>
std::optional<std::size_t> settle_index(const std::vector<EpisodeRow>& rows, Pred pred,
                                        bool first_crossing) {
  if (first_crossing) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (pred(rows[i])) return i;
    }
    return std::nullopt;
  }
  std::size_t i = rows.size();
  while (i > 0 && pred(rows[i - 1])) --i;
  if (i == rows.size()) return std::nullopt;
  return i;
}

}  // namespace

void RobotProfile::validate() const {
  if (name.empty()) throw InvalidArgument("profile name must not be empty");
  limits.validate();
  timing.validate();
  camera.validate();
}

RobotProfile RobotProfile::fast() {
  RobotProfile p;
  p.name = "fast";
  p.limits = {0.25, 1.0, 5.0, 1.0, 4.0, 20.0};
  p.timing = Timing::make(1.0 / 60.0, 1.0 / 500.0);
  p.camera = CameraModel{};
  return p;
}

RobotProfile RobotProfile::slow() {
  RobotProfile p;
  p.name = "slow";
  p.limits = {0.1, 0.4, 2.0, 0.4, 1.6, 8.0};
  p.timing = Timing::make(1.0 / 30.0, 1.0 / 250.0);
  p.camera.image_width = 2048.0;
  p.camera.image_height = 1536.0;
  p.camera.target = {1024.0, 768.0};
  return p;
}

RobotProfile RobotProfile::builtin(std::string_view name) {
  if (name == "fast") return fast();
  if (name == "slow") return slow();
  throw ConfigError("unknown built-in profile '" + std::string(name) + "'");
}

void ExperimentGrid::validate() const {
  if (!(radius_mm >= 0.0) || !std::isfinite(radius_mm)) {
    throw InvalidArgument("grid radius must be nonnegative");
  }
  if (positions == 0) throw InvalidArgument("grid needs at least one position");
  if (angle_errors_deg.empty()) throw InvalidArgument("grid needs at least one angle error");
  auto sorted = angle_errors_deg;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (std::abs(sorted[i] + sorted[sorted.size() - 1 - i]) > 1e-9) {
      throw InvalidArgument("grid angle errors must be symmetric around 0");
    }
  }
}

ExperimentGrid ExperimentGrid::small() { return {"small", 35.0, arange(-15.0, 15.0, 3.0), 11}; }

ExperimentGrid ExperimentGrid::large() { return {"large", 70.0, arange(-25.0, 25.0, 5.0), 11}; }

ExperimentGrid ExperimentGrid::builtin(std::string_view name) {
  if (name == "small") return small();
  if (name == "large") return large();
  throw ConfigError("unknown built-in grid '" + std::string(name) + "'");
}

Scene parse_scene(std::string_view name) {
  if (name == "normal") return Scene::kNormal;
  if (name == "clutter") return Scene::kClutter;
  throw ConfigError("unknown scene '" + std::string(name) + "' (expected normal|clutter)");
}

std::string_view scene_name(Scene scene) {
  return scene == Scene::kNormal ? "normal" : "clutter";
}

NoiseModel scene_noise(Scene scene) {
  NoiseModel n;
  n.sigma_center = 2.0;
  n.sigma_phi = deg2rad(1.0);
  if (scene == Scene::kClutter) {
    n.outlier_prob = 0.05;
    n.outlier_radius = 100.0;
  }
  return n;
}

SceneConfig SceneConfig::defaults(Scene scene) {
  SceneConfig s;
  s.scene = scene;
  s.noise = scene_noise(scene);
  return s;
}

SceneConfig SceneConfig::noiseless(Scene scene) {
  SceneConfig s;
  s.scene = scene;
  s.noise = NoiseModel{};
  return s;
}

EpisodeSummary compute_metrics(const EpisodeRecord& record, const Thresholds& th) {
  if (record.rows.empty()) throw InvalidArgument("cannot summarize an empty episode");
  const auto& rows = record.rows;
  EpisodeSummary s;

  const auto r_idx = settle_index(
      rows, [&](const EpisodeRow& r) { return r.pixel_error < th.pixel; }, th.first_crossing);
  const auto p_idx = settle_index(
      rows, [&](const EpisodeRow& r) { return std::abs(r.err_phi_deg) < th.degrees; },
      th.first_crossing);
  if (r_idx) s.t_r = rows[*r_idx].t;
  if (p_idx) s.t_phi = rows[*p_idx].t;
  s.converged = r_idx.has_value() && p_idx.has_value();

  std::size_t tail = rows.size() - rows.size() / 4;
  if (s.converged) tail = std::max(*r_idx, *p_idx);
  tail = std::min(tail, rows.size() - 1);
  double sx = 0.0, sy = 0.0, sp = 0.0;
  for (std::size_t i = tail; i < rows.size(); ++i) {
    sx += std::abs(rows[i].err_x_mm);
    sy += std::abs(rows[i].err_y_mm);
    sp += std::abs(rows[i].err_phi_deg);
  }
  const double n = static_cast<double>(rows.size() - tail);
  s.mae_x_mm = sx / n;
  s.mae_y_mm = sy / n;
  s.mae_phi_deg = sp / n;

  const double d0 = std::hypot(record.initial.x, record.initial.y);
  const double a0 = std::abs(record.initial.phi);
  if (s.t_r && *s.t_r > 0.0) s.speed_mm_s = d0 / *s.t_r;
  if (s.t_phi && *s.t_phi > 0.0) s.speed_rad_s = a0 / *s.t_phi;

  for (const auto& r : rows) s.max_overshoot = std::max(s.max_overshoot, r.overshoot);
  for (const auto& c : record.cycles) {
    if (c.numerical_failure) ++s.numerical_failures;
  }
  for (const auto& d : record.detections) {
    if (d.lost) ++s.lost_detections;
  }
  return s;
}

std::vector<RobotState> generate_grid(const ExperimentGrid& grid, bool cross_product) {
  grid.validate();
  std::vector<RobotState> out;
  auto at = [&](std::size_t p, double angle_deg) {
    const double theta = 2.0 * kPi * static_cast<double>(p) / static_cast<double>(grid.positions);
    RobotState s;
    s.x = grid.radius_mm * std::cos(theta);
    s.y = grid.radius_mm * std::sin(theta);
    s.phi = wrap_angle(deg2rad(angle_deg));
    return s;
  };
  if (cross_product) {
    for (std::size_t p = 0; p < grid.positions; ++p) {
      for (double a : grid.angle_errors_deg) out.push_back(at(p, a));
    }
  } else {
    // One angle per position; the shorter list is cycled.
    const std::size_t n = std::max(grid.positions, grid.angle_errors_deg.size());
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(at(i % grid.positions, grid.angle_errors_deg[i % grid.angle_errors_deg.size()]));
    }
  }
  return out;
}

void SuiteConfig::validate() const {
  profile.validate();
  grid.validate();
  scene.noise.validate();
  loop.validate();
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");
  if (jobs == 0) throw InvalidArgument("jobs must be at least 1");
}

SimConfig SuiteConfig::sim_config(std::size_t index) const {
  SimConfig sim;
  sim.camera = profile.camera;
  sim.noise = scene.noise;
  sim.noise.seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
  sim.detection_period = profile.timing.t_d;
  sim.control_period = profile.timing.t_r;
  sim.detection_latency = scene.detection_latency.value_or(profile.timing.t_d);
  sim.object_width = scene.object_width;
  sim.object_height = scene.object_height;
  return sim;
}

double emitted_ratio(const EpisodeRecord& record, const KinematicLimits& limits) {
  double r = 0.0;
  for (const auto& row : record.rows) {
    r = std::max({r, std::abs(row.v_x) / limits.v_max, std::abs(row.v_y) / limits.v_max,
                  std::abs(row.omega) / limits.omega_max});
  }
  return r;
}

EpisodeResult run_single(const SuiteConfig& config, std::size_t index, const RobotState& initial) {
  EpisodeResult res;
  res.index = index;
  res.initial = initial;
  res.record = run_episode(config.sim_config(index), config.profile.limits,
                           config.profile.timing, initial, config.duration, config.loop);
  res.summary = compute_metrics(res.record, config.thresholds);
  res.max_emitted_ratio = emitted_ratio(res.record, config.profile.limits);
  return res;
}

SuiteSummary summarize(const std::vector<EpisodeResult>& episodes) {
  SuiteSummary s;
  s.episodes = episodes.size();
  double tr = 0.0, tp = 0.0;
  std::size_t ntr = 0, ntp = 0;
  for (const auto& e : episodes) {
    const auto& m = e.summary;
    if (m.converged) ++s.converged;
    s.mae_x_mm += m.mae_x_mm;
    s.mae_y_mm += m.mae_y_mm;
    s.mae_phi_deg += m.mae_phi_deg;
    if (m.converged && m.t_r) tr += *m.t_r, ++ntr;
    if (m.converged && m.t_phi) tp += *m.t_phi, ++ntp;
    s.max_overshoot = std::max(s.max_overshoot, m.max_overshoot);
    s.max_emitted_ratio = std::max(s.max_emitted_ratio, e.max_emitted_ratio);
  }
  if (!episodes.empty()) {
    const double n = static_cast<double>(episodes.size());
    s.mae_x_mm /= n;
    s.mae_y_mm /= n;
    s.mae_phi_deg /= n;
  }
  if (ntr) s.t_r = tr / static_cast<double>(ntr);
  if (ntp) s.t_phi = tp / static_cast<double>(ntp);
  return s;
}

SuiteResult run_suite(const SuiteConfig& config) {
  config.validate();
  const auto initial = generate_grid(config.grid, config.cross_product);
  SuiteResult result;
  result.episodes.resize(initial.size());

  if (config.jobs <= 1) {
    for (std::size_t i = 0; i < initial.size(); ++i) {
      result.episodes[i] = run_single(config, i, initial[i]);
    }
  } else {
    // Episodes are independent; each lands in its own slot.
    std::size_t next = 0;
    while (next < initial.size()) {
      std::vector<std::future<EpisodeResult>> batch;
      for (unsigned j = 0; j < config.jobs && next < initial.size(); ++j, ++next) {
        batch.push_back(std::async(std::launch::async, run_single, std::cref(config), next,
                                   initial[next]));
      }
      for (auto& f : batch) {
        EpisodeResult r = f.get();
        const std::size_t idx = r.index;
        result.episodes[idx] = std::move(r);
      }
    }
  }
  result.summary = summarize(result.episodes);
  return result;
}

std::vector<SweepPoint> run_sweep(const SuiteConfig& base, const std::vector<RobotProfile>& profiles,
                                  const std::vector<double>& sigmas_px) {
  std::vector<SweepPoint> out;
  for (const auto& profile : profiles) {
    for (double sigma : sigmas_px) {
      SuiteConfig cfg = base;
      cfg.profile = profile;
      cfg.scene.noise.sigma_center = sigma;
      cfg.scene.noise.sigma_phi = deg2rad(sigma / 2.0);
      SuiteResult r = run_suite(cfg);
      out.push_back({profile.name, sigma, cfg.scene.noise.sigma_phi, r.summary});
    }
  }
  return out;
}

}  // namespace vservo
