#include "vservo/vservo.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <string>

#include "vservo/detection_stream.hpp"
#include "vservo/error.hpp"
#include "vservo/harness.hpp"
#include "vservo/io.hpp"
#include "vservo/servo_loop.hpp"

using namespace vservo;

struct vs_planner {
  QuinticPlanner planner;
};

struct vs_profile {
  RobotProfile profile;
};

struct vs_experiment {
  SuiteConfig config;
};

struct vs_loop {
  ServoLoop loop;
  ImagePoint target;
};

struct vs_realtime {
  std::unique_ptr<RealtimeRunner> runner;
  ImagePoint target;
  NormalizationParams normalization;
};

namespace {

thread_local std::string g_last_error;

vs_status fail(vs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

vs_status from_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return VS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kNumericalFailure: return VS_ERR_NUMERICAL;
    case ErrorCode::kConfig: return VS_ERR_CONFIG;
    case ErrorCode::kIo: return VS_ERR_IO;
    case ErrorCode::kParse: return VS_ERR_PARSE;
  }
  return VS_ERR_INTERNAL;
}

// Runs fn and converts any exception into a status code.
template <typename Fn>
vs_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VS_ERR_INTERNAL, e.what());
  }
}

#define VS_REQUIRE(ptr)                                                              \
  do {                                                                               \
    if ((ptr) == nullptr) return fail(VS_ERR_INVALID_ARGUMENT, #ptr " is NULL");     \
  } while (0)

KinematicLimits to_limits(const vs_limits& l) {
  return {l.v_max, l.a_max, l.j_max, l.omega_max, l.alpha_max, l.zeta_max};
}

LoopConfig to_loop(const vs_servo_params& p) {
  LoopConfig c;
  c.normalization = {p.u_r, p.u_phi, p.eps_r, p.eps_phi};
  c.filter_size = p.filter_size;
  c.clamp = p.clamp != 0;
  c.lost_hold_cycles = p.lost_hold_cycles;
  c.validate();
  return c;
}

std::optional<ObbDetection> to_detection(const vs_detection& d) {
  if (d.lost) return std::nullopt;
  ObbDetection o;
  o.timestamp = d.timestamp;
  o.center = {d.cx, d.cy};
  o.width = d.width;
  o.height = d.height;
  o.phi = wrap_angle(d.phi);
  o.validate();
  return o;
}

vs_status copy_samples(const VelocityTrajectory& traj, vs_sample* out, size_t capacity,
                       size_t* written) {
  if (written) *written = traj.samples.size();
  if (capacity < traj.samples.size()) {
    return fail(VS_ERR_BUFFER_TOO_SMALL, "sample buffer holds " + std::to_string(capacity) +
                                             ", need " + std::to_string(traj.samples.size()));
  }
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    out[i] = {traj.samples[i].v_x, traj.samples[i].v_y, traj.samples[i].omega};
  }
  return VS_OK;
}

void fill(const SuiteSummary& s, vs_suite_summary* out) {
  out->episodes = s.episodes;
  out->converged = s.converged;
  out->mae_x_mm = s.mae_x_mm;
  out->mae_y_mm = s.mae_y_mm;
  out->mae_phi_deg = s.mae_phi_deg;
  out->has_t_r = s.t_r.has_value();
  out->t_r = s.t_r.value_or(0.0);
  out->has_t_phi = s.t_phi.has_value();
  out->t_phi = s.t_phi.value_or(0.0);
  out->max_overshoot = s.max_overshoot;
  out->max_emitted_ratio = s.max_emitted_ratio;
}

}  // namespace

extern "C" {

const char* vs_version(void) { return "0.1.0"; }

const char* vs_status_string(vs_status status) {
  switch (status) {
    case VS_OK: return "ok";
    case VS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VS_ERR_NUMERICAL: return "numerical failure";
    case VS_ERR_CONFIG: return "configuration error";
    case VS_ERR_IO: return "i/o error";
    case VS_ERR_PARSE: return "parse error";
    case VS_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case VS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* vs_last_error(void) { return g_last_error.c_str(); }

vs_status vs_servo_params_default(vs_servo_params* out) {
  VS_REQUIRE(out);
  const LoopConfig d;
  *out = {d.normalization.u_r, d.normalization.u_phi, d.normalization.eps_r,
          d.normalization.eps_phi, d.filter_size, d.clamp ? 1 : 0, d.lost_hold_cycles};
  return VS_OK;
}

// planner

vs_status vs_planner_create(const vs_limits* limits, double t_d, double t_r, int clamp,
                            vs_planner** out) {
  VS_REQUIRE(limits);
  VS_REQUIRE(out);
  return guarded([&] {
    *out = new vs_planner{QuinticPlanner(to_limits(*limits), Timing::make(t_d, t_r), clamp != 0)};
    return VS_OK;
  });
}

void vs_planner_destroy(vs_planner* planner) { delete planner; }

size_t vs_planner_samples_per_cycle(const vs_planner* planner) {
  return planner ? planner->planner.timing().k : 0;
}

vs_status vs_planner_plan(vs_planner* planner, double r_x, double r_y, double phi,
                          vs_sample* out, size_t capacity, size_t* written, double* overshoot) {
  VS_REQUIRE(planner);
  VS_REQUIRE(out);
  if (capacity < planner->planner.timing().k) {
    if (written) *written = planner->planner.timing().k;
    return fail(VS_ERR_BUFFER_TOO_SMALL, "sample buffer too small");
  }
  return guarded([&] {
    auto cycle = planner->planner.plan(FilteredCommand{{r_x, r_y}, phi});
    if (overshoot) *overshoot = cycle.max_overshoot;
    return copy_samples(cycle.emitted, out, capacity, written);
  });
}

vs_status vs_planner_reset(vs_planner* planner) {
  VS_REQUIRE(planner);
  planner->planner.reset();
  return VS_OK;
}

vs_status vs_quintic_solve(double t_s, double t_t, const double start[3], const double target[3],
                           double coeffs[6]) {
  VS_REQUIRE(start);
  VS_REQUIRE(target);
  VS_REQUIRE(coeffs);
  return guarded([&] {
    auto sys = build_system({start[0], start[1], start[2]}, {target[0], target[1], target[2]},
                            t_s, t_t);
    auto q = solve_coefficients(sys.m, sys.b);
    std::memcpy(coeffs, q.data(), sizeof(double) * 6);
    return VS_OK;
  });
}

// profiles

vs_status vs_profile_builtin(const char* name, vs_profile** out) {
  VS_REQUIRE(name);
  VS_REQUIRE(out);
  return guarded([&] {
    *out = new vs_profile{RobotProfile::builtin(name)};
    return VS_OK;
  });
}

vs_status vs_profile_load(const char* path, vs_profile** out) {
  VS_REQUIRE(path);
  VS_REQUIRE(out);
  return guarded([&] {
    *out = new vs_profile{io::load_profile(path)};
    return VS_OK;
  });
}

void vs_profile_destroy(vs_profile* profile) { delete profile; }

const char* vs_profile_name(const vs_profile* profile) {
  return profile ? profile->profile.name.c_str() : "";
}

vs_status vs_profile_limits(const vs_profile* profile, vs_limits* out) {
  VS_REQUIRE(profile);
  VS_REQUIRE(out);
  const auto& l = profile->profile.limits;
  *out = {l.v_max, l.a_max, l.j_max, l.omega_max, l.alpha_max, l.zeta_max};
  return VS_OK;
}

vs_status vs_profile_timing(const vs_profile* profile, double* t_d, double* t_r, size_t* k) {
  VS_REQUIRE(profile);
  const auto& t = profile->profile.timing;
  if (t_d) *t_d = t.t_d;
  if (t_r) *t_r = t.t_r;
  if (k) *k = t.k;
  return VS_OK;
}

// experiments

vs_status vs_experiment_create(const vs_profile* profile, vs_experiment** out) {
  VS_REQUIRE(profile);
  VS_REQUIRE(out);
  return guarded([&] {
    auto* e = new vs_experiment{};
    e->config.profile = profile->profile;
    *out = e;
    return VS_OK;
  });
}

void vs_experiment_destroy(vs_experiment* exp) { delete exp; }

vs_status vs_experiment_set_profile(vs_experiment* exp, const vs_profile* profile) {
  VS_REQUIRE(exp);
  VS_REQUIRE(profile);
  exp->config.profile = profile->profile;
  return VS_OK;
}

vs_status vs_experiment_set_scene(vs_experiment* exp, const char* name) {
  VS_REQUIRE(exp);
  VS_REQUIRE(name);
  return guarded([&] {
    exp->config.scene = SceneConfig::defaults(parse_scene(name));
    return VS_OK;
  });
}

vs_status vs_experiment_load_scene(vs_experiment* exp, const char* path) {
  VS_REQUIRE(exp);
  VS_REQUIRE(path);
  return guarded([&] {
    exp->config.scene = io::load_scene(path);
    return VS_OK;
  });
}

vs_status vs_experiment_set_noise(vs_experiment* exp, double sigma_center_px,
                                  double sigma_phi_rad, double outlier_prob,
                                  double outlier_radius_px) {
  VS_REQUIRE(exp);
  return guarded([&] {
    NoiseModel n;
    n.sigma_center = sigma_center_px;
    n.sigma_phi = sigma_phi_rad;
    n.outlier_prob = outlier_prob;
    n.outlier_radius = outlier_radius_px;
    n.validate();
    exp->config.scene.noise = n;
    return VS_OK;
  });
}

vs_status vs_experiment_set_grid(vs_experiment* exp, const char* name) {
  VS_REQUIRE(exp);
  VS_REQUIRE(name);
  return guarded([&] {
    exp->config.grid = ExperimentGrid::builtin(name);
    return VS_OK;
  });
}

vs_status vs_experiment_load_grid(vs_experiment* exp, const char* path) {
  VS_REQUIRE(exp);
  VS_REQUIRE(path);
  return guarded([&] {
    exp->config.grid = io::load_grid(path);
    return VS_OK;
  });
}

vs_status vs_experiment_set_servo(vs_experiment* exp, const vs_servo_params* params) {
  VS_REQUIRE(exp);
  VS_REQUIRE(params);
  return guarded([&] {
    exp->config.loop = to_loop(*params);
    return VS_OK;
  });
}

vs_status vs_experiment_load_servo(vs_experiment* exp, const char* path) {
  VS_REQUIRE(exp);
  VS_REQUIRE(path);
  return guarded([&] {
    exp->config.loop = io::load_loop(path);
    return VS_OK;
  });
}

vs_status vs_experiment_set_seed(vs_experiment* exp, uint64_t seed) {
  VS_REQUIRE(exp);
  exp->config.seed = seed;
  return VS_OK;
}

vs_status vs_experiment_set_duration(vs_experiment* exp, double seconds) {
  VS_REQUIRE(exp);
  if (!(seconds > 0.0)) return fail(VS_ERR_INVALID_ARGUMENT, "duration must be positive");
  exp->config.duration = seconds;
  return VS_OK;
}

vs_status vs_experiment_set_cross_product(vs_experiment* exp, int enabled) {
  VS_REQUIRE(exp);
  exp->config.cross_product = enabled != 0;
  return VS_OK;
}

vs_status vs_experiment_set_first_crossing(vs_experiment* exp, int enabled) {
  VS_REQUIRE(exp);
  exp->config.thresholds.first_crossing = enabled != 0;
  return VS_OK;
}

vs_status vs_experiment_set_jobs(vs_experiment* exp, unsigned jobs) {
  VS_REQUIRE(exp);
  if (jobs == 0) return fail(VS_ERR_INVALID_ARGUMENT, "jobs must be at least 1");
  exp->config.jobs = jobs;
  return VS_OK;
}

vs_status vs_experiment_grid_size(const vs_experiment* exp, size_t* out) {
  VS_REQUIRE(exp);
  VS_REQUIRE(out);
  return guarded([&] {
    *out = generate_grid(exp->config.grid, exp->config.cross_product).size();
    return VS_OK;
  });
}

vs_status vs_experiment_grid_pose(const vs_experiment* exp, size_t index, vs_pose* out) {
  VS_REQUIRE(exp);
  VS_REQUIRE(out);
  return guarded([&] {
    const auto grid = generate_grid(exp->config.grid, exp->config.cross_product);
    if (index >= grid.size()) return fail(VS_ERR_INVALID_ARGUMENT, "grid index out of range");
    *out = {grid[index].x, grid[index].y, grid[index].phi};
    return VS_OK;
  });
}

vs_status vs_experiment_run_episode(const vs_experiment* exp, const vs_pose* initial,
                                    const char* csv_path, vs_episode_summary* out) {
  VS_REQUIRE(exp);
  VS_REQUIRE(initial);
  return guarded([&] {
    exp->config.validate();
    RobotState s;
    s.x = initial->x_mm;
    s.y = initial->y_mm;
    s.phi = wrap_angle(initial->phi_rad);
    EpisodeResult r = run_single(exp->config, 0, s);
    if (csv_path) io::write_episode_csv(csv_path, r.record);
    if (out) {
      const auto& m = r.summary;
      out->converged = m.converged;
      out->has_t_r = m.t_r.has_value();
      out->t_r = m.t_r.value_or(0.0);
      out->has_t_phi = m.t_phi.has_value();
      out->t_phi = m.t_phi.value_or(0.0);
      out->mae_x_mm = m.mae_x_mm;
      out->mae_y_mm = m.mae_y_mm;
      out->mae_phi_deg = m.mae_phi_deg;
      out->max_overshoot = m.max_overshoot;
      out->max_emitted_ratio = r.max_emitted_ratio;
      out->final_x_mm = r.record.final_state.x;
      out->final_y_mm = r.record.final_state.y;
      out->final_phi_deg = rad2deg(r.record.final_state.phi);
      out->lost_detections = m.lost_detections;
      out->numerical_failures = m.numerical_failures;
    }
    return VS_OK;
  });
}

vs_status vs_experiment_run_suite(const vs_experiment* exp, const char* out_dir,
                                  vs_suite_summary* out) {
  VS_REQUIRE(exp);
  return guarded([&] {
    SuiteResult r = run_suite(exp->config);
    if (out_dir) io::write_suite(out_dir, exp->config, r);
    if (out) {
      fill(r.summary, out);
      const std::string h = io::config_hash(io::manifest(exp->config, "suite")["config"]);
      std::memcpy(out->config_hash, h.c_str(), 17);
    }
    return VS_OK;
  });
}

vs_status vs_experiment_run_sweep(const vs_experiment* exp, const vs_profile* const* profiles,
                                  size_t profile_count, const double* sigmas_px,
                                  size_t sigma_count, const char* out_dir) {
  VS_REQUIRE(exp);
  VS_REQUIRE(sigmas_px);
  VS_REQUIRE(out_dir);
  if (profile_count > 0) VS_REQUIRE(profiles);
  return guarded([&] {
    std::vector<RobotProfile> list;
    for (size_t i = 0; i < profile_count; ++i) {
      if (!profiles[i]) return fail(VS_ERR_INVALID_ARGUMENT, "profiles[i] is NULL");
      list.push_back(profiles[i]->profile);
    }
    if (list.empty()) list.push_back(exp->config.profile);
    const auto points =
        run_sweep(exp->config, list, std::vector<double>(sigmas_px, sigmas_px + sigma_count));
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "sweep.csv";
    std::ofstream os(path, std::ios::binary);
    if (!os) return fail(VS_ERR_IO, "cannot write " + path.string());
    io::write_sweep_csv(os, points);
    std::ofstream ms(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary);
    ms << io::manifest(exp->config, "sweep").dump(2) << '\n';
    return VS_OK;
  });
}

// servo loop

vs_status vs_loop_create(const vs_profile* profile, const vs_servo_params* params,
                         vs_loop** out) {
  VS_REQUIRE(profile);
  VS_REQUIRE(out);
  return guarded([&] {
    const LoopConfig cfg = params ? to_loop(*params) : LoopConfig{};
    const auto& p = profile->profile;
    *out = new vs_loop{ServoLoop(p.limits, p.timing, cfg), p.camera.target};
    return VS_OK;
  });
}

void vs_loop_destroy(vs_loop* loop) { delete loop; }

vs_status vs_loop_submit(vs_loop* loop, const vs_detection* detection) {
  VS_REQUIRE(loop);
  VS_REQUIRE(detection);
  return guarded([&] {
    auto det = to_detection(*detection);
    auto cmd = detection_tick(det, loop->target, loop->loop.config().normalization);
    if (cmd) {
      loop->loop.submit(*cmd);
    } else {
      loop->loop.report_lost(detection->timestamp);
    }
    return VS_OK;
  });
}

vs_status vs_loop_command(const vs_loop* loop, double* r_x, double* r_y, double* phi) {
  VS_REQUIRE(loop);
  const auto& c = loop->loop.state().latest_cmd;
  if (r_x) *r_x = c.r_n.x;
  if (r_y) *r_y = c.r_n.y;
  if (phi) *phi = c.phi_n;
  return VS_OK;
}

vs_status vs_loop_cycle(vs_loop* loop, vs_sample* out, size_t capacity, size_t* written,
                        double* overshoot) {
  VS_REQUIRE(loop);
  VS_REQUIRE(out);
  const std::size_t k = loop->loop.planner().timing().k;
  if (capacity < k) {
    if (written) *written = k;
    return fail(VS_ERR_BUFFER_TOO_SMALL, "sample buffer too small");
  }
  return guarded([&] {
    CycleOutput c = loop->loop.control_cycle();
    if (overshoot) *overshoot = c.log.max_overshoot;
    if (c.log.numerical_failure) {
      copy_samples(c.trajectory, out, capacity, written);
      return fail(VS_ERR_NUMERICAL, "planning failed; emitted ramp to zero");
    }
    return copy_samples(c.trajectory, out, capacity, written);
  });
}

vs_status vs_parse_detection_line(const char* line, vs_detection* out, int* has_frame) {
  VS_REQUIRE(line);
  VS_REQUIRE(out);
  VS_REQUIRE(has_frame);
  return guarded([&] {
    auto frame = parse_detection_line(line);
    *has_frame = frame.has_value();
    if (!frame) return VS_OK;
    *out = vs_detection{};
    out->timestamp = frame->timestamp;
    if (frame->detection) {
      const auto& d = *frame->detection;
      out->cx = d.center.x;
      out->cy = d.center.y;
      out->width = d.width;
      out->height = d.height;
      out->phi = d.phi;
    } else {
      out->lost = 1;
    }
    return VS_OK;
  });
}

// realtime

vs_status vs_realtime_create(const vs_profile* profile, const vs_servo_params* params,
                             vs_sample_callback callback, void* user, vs_realtime** out) {
  VS_REQUIRE(profile);
  VS_REQUIRE(callback);
  VS_REQUIRE(out);
  return guarded([&] {
    const LoopConfig cfg = params ? to_loop(*params) : LoopConfig{};
    const auto& p = profile->profile;
    auto rt = std::make_unique<vs_realtime>();
    rt->target = p.camera.target;
    rt->normalization = cfg.normalization;
    rt->runner = std::make_unique<RealtimeRunner>(
        p.limits, p.timing, cfg, [callback, user](double t, const TwistSample& s) {
          const vs_sample cs{s.v_x, s.v_y, s.omega};
          callback(t, &cs, user);
        });
    *out = rt.release();
    return VS_OK;
  });
}

void vs_realtime_destroy(vs_realtime* rt) { delete rt; }

vs_status vs_realtime_start(vs_realtime* rt) {
  VS_REQUIRE(rt);
  return guarded([&] {
    rt->runner->start();
    return VS_OK;
  });
}

vs_status vs_realtime_stop(vs_realtime* rt) {
  VS_REQUIRE(rt);
  rt->runner->stop();
  return VS_OK;
}

vs_status vs_realtime_submit(vs_realtime* rt, const vs_detection* detection) {
  VS_REQUIRE(rt);
  VS_REQUIRE(detection);
  return guarded([&] {
    auto cmd = detection_tick(to_detection(*detection), rt->target, rt->normalization);
    if (cmd) {
      rt->runner->submit(*cmd);
    } else {
      rt->runner->report_lost(detection->timestamp);
    }
    return VS_OK;
  });
}

vs_status vs_realtime_stats(const vs_realtime* rt, size_t* cycles, size_t* overruns) {
  VS_REQUIRE(rt);
  if (cycles) *cycles = rt->runner->cycles();
  if (overruns) *overruns = rt->runner->overruns();
  return VS_OK;
}

}  // extern "C"
