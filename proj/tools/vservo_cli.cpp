// Command line front end. Talks to the library only through vservo.h.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vservo/vservo.h"

namespace {

struct Options {
  std::vector<std::string> profiles{"fast"};
  std::string scene = "normal";
  std::string grid = "small";
  std::string servo;
  std::uint64_t seed = 0;
  std::string out;
  double duration = 20.0;
  bool cross_product = false;
  bool first_crossing = false;
  bool noise_free = false;
  unsigned jobs = 1;
  std::size_t index = 0;
  std::vector<double> pose;  // x_mm y_mm phi_deg
  std::vector<double> sigmas{0.0, 1.0, 2.0, 4.0};
  std::string input = "-";
  bool realtime = false;
};

[[noreturn]] void die(vs_status s, const std::string& what) {
  std::cerr << "vservo: " << what << ": " << vs_status_string(s) << ": " << vs_last_error()
            << "\n";
  std::exit(s == VS_ERR_CONFIG || s == VS_ERR_INVALID_ARGUMENT || s == VS_ERR_PARSE ? 2 : 1);
}

void check(vs_status s, const std::string& what) {
  if (s != VS_OK) die(s, what);
}

bool is_file(const std::string& s) { return std::filesystem::is_regular_file(s); }

using ProfilePtr = std::unique_ptr<vs_profile, decltype(&vs_profile_destroy)>;
using ExperimentPtr = std::unique_ptr<vs_experiment, decltype(&vs_experiment_destroy)>;

ProfilePtr load_profile(const std::string& spec) {
  vs_profile* p = nullptr;
  check(is_file(spec) ? vs_profile_load(spec.c_str(), &p) : vs_profile_builtin(spec.c_str(), &p),
        "profile '" + spec + "'");
  return {p, &vs_profile_destroy};
}

ExperimentPtr make_experiment(const Options& o, const vs_profile* profile) {
  vs_experiment* e = nullptr;
  check(vs_experiment_create(profile, &e), "experiment");
  ExperimentPtr exp(e, &vs_experiment_destroy);
  check(is_file(o.scene) ? vs_experiment_load_scene(e, o.scene.c_str())
                         : vs_experiment_set_scene(e, o.scene.c_str()),
        "scene '" + o.scene + "'");
  check(is_file(o.grid) ? vs_experiment_load_grid(e, o.grid.c_str())
                        : vs_experiment_set_grid(e, o.grid.c_str()),
        "grid '" + o.grid + "'");
  if (!o.servo.empty()) check(vs_experiment_load_servo(e, o.servo.c_str()), "servo config");
  if (o.noise_free) check(vs_experiment_set_noise(e, 0, 0, 0, 0), "noise");
  check(vs_experiment_set_seed(e, o.seed), "seed");
  check(vs_experiment_set_duration(e, o.duration), "duration");
  check(vs_experiment_set_cross_product(e, o.cross_product), "cross product");
  check(vs_experiment_set_first_crossing(e, o.first_crossing), "first crossing");
  check(vs_experiment_set_jobs(e, o.jobs), "jobs");
  return exp;
}

std::string opt(int has, double v) {
  if (!has) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

int cmd_run(const Options& o) {
  auto profile = load_profile(o.profiles.front());
  auto exp = make_experiment(o, profile.get());
  vs_pose pose{};
  if (o.pose.size() == 3) {
    pose = {o.pose[0], o.pose[1], o.pose[2] * 3.14159265358979323846 / 180.0};
  } else {
    check(vs_experiment_grid_pose(exp.get(), o.index, &pose), "grid pose");
  }
  std::string csv;
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    csv = (std::filesystem::path(o.out) / "episode.csv").string();
  }
  vs_episode_summary s{};
  check(vs_experiment_run_episode(exp.get(), &pose, csv.empty() ? nullptr : csv.c_str(), &s),
        "episode");
  std::printf("initial      x=%.3f mm y=%.3f mm phi=%.3f deg\n", pose.x_mm, pose.y_mm,
              pose.phi_rad * 180.0 / 3.14159265358979323846);
  std::printf("final        x=%.4f mm y=%.4f mm phi=%.4f deg\n", s.final_x_mm, s.final_y_mm,
              s.final_phi_deg);
  std::printf("converged    %s\n", s.converged ? "yes" : "no");
  std::printf("t_r          %s s\nt_phi        %s s\n", opt(s.has_t_r, s.t_r).c_str(),
              opt(s.has_t_phi, s.t_phi).c_str());
  std::printf("mae          x=%.4f mm y=%.4f mm phi=%.4f deg\n", s.mae_x_mm, s.mae_y_mm,
              s.mae_phi_deg);
  std::printf("overshoot    pre-clamp %.3f, emitted %.3f\n", s.max_overshoot,
              s.max_emitted_ratio);
  if (!csv.empty()) std::printf("wrote        %s\n", csv.c_str());
  return 0;
}

int cmd_suite(const Options& o) {
  auto profile = load_profile(o.profiles.front());
  auto exp = make_experiment(o, profile.get());
  vs_suite_summary s{};
  check(vs_experiment_run_suite(exp.get(), o.out.empty() ? nullptr : o.out.c_str(), &s),
        "suite");
  std::printf("profile %s  grid %s  scene %s  seed %llu  config %s\n",
              vs_profile_name(profile.get()), o.grid.c_str(), o.scene.c_str(),
              static_cast<unsigned long long>(o.seed), s.config_hash);
  std::printf("converged    %zu/%zu\n", s.converged, s.episodes);
  std::printf("dx [mm]      %.4f\ndy [mm]      %.4f\ndphi [deg]   %.4f\n", s.mae_x_mm,
              s.mae_y_mm, s.mae_phi_deg);
  std::printf("t_r [s]      %s\nt_phi [s]    %s\n", opt(s.has_t_r, s.t_r).c_str(),
              opt(s.has_t_phi, s.t_phi).c_str());
  std::printf("overshoot    pre-clamp %.3f, emitted %.3f\n", s.max_overshoot,
              s.max_emitted_ratio);
  if (!o.out.empty()) std::printf("wrote        %s\n", o.out.c_str());
  return s.converged == s.episodes ? 0 : 3;
}

int cmd_sweep(const Options& o) {
  std::vector<ProfilePtr> owned;
  std::vector<const vs_profile*> raw;
  for (const auto& p : o.profiles) {
    owned.push_back(load_profile(p));
    raw.push_back(owned.back().get());
  }
  auto exp = make_experiment(o, raw.front());
  const std::string out = o.out.empty() ? "sweep" : o.out;
  check(vs_experiment_run_sweep(exp.get(), raw.data(), raw.size(), o.sigmas.data(),
                                o.sigmas.size(), out.c_str()),
        "sweep");
  std::ifstream in(std::filesystem::path(out) / "sweep.csv");
  std::cout << in.rdbuf();
  return 0;
}

void print_sample(double t, const vs_sample& s) {
  std::printf("%.17g,%.17g,%.17g,%.17g\n", t, s.v_x, s.v_y, s.omega);
}

struct StreamSink {
  std::mutex mutex;
};

void on_realtime_sample(double t, const vs_sample* s, void* user) {
  auto* sink = static_cast<StreamSink*>(user);
  std::lock_guard lock(sink->mutex);
  print_sample(t, *s);
  std::fflush(stdout);
}

int cmd_stream(const Options& o) {
  auto profile = load_profile(o.profiles.front());
  vs_servo_params params{};
  vs_servo_params_default(&params);

  std::ifstream file;
  std::istream* in = &std::cin;
  if (o.input != "-") {
    file.open(o.input);
    if (!file) {
      std::cerr << "vservo: cannot open " << o.input << "\n";
      return 1;
    }
    in = &file;
  }

  std::printf("t,v_x,v_y,omega\n");
  std::string line;
  vs_detection det{};
  int has = 0;

  if (o.realtime) {
    StreamSink sink;
    vs_realtime* rt = nullptr;
    check(vs_realtime_create(profile.get(), &params, on_realtime_sample, &sink, &rt), "realtime");
    std::unique_ptr<vs_realtime, decltype(&vs_realtime_destroy)> guard(rt, &vs_realtime_destroy);
    double t_d = 0, t_r = 0;
    std::size_t k = 0;
    vs_profile_timing(profile.get(), &t_d, &t_r, &k);
    check(vs_realtime_start(rt), "realtime start");
    // Frames are replayed at their timestamps relative to the first one.
    const auto wall0 = std::chrono::steady_clock::now();
    std::optional<double> t0;
    while (std::getline(*in, line)) {
      check(vs_parse_detection_line(line.c_str(), &det, &has), "detection line");
      if (!has) continue;
      if (!t0) t0 = det.timestamp;
      std::this_thread::sleep_until(wall0 + std::chrono::duration<double>(det.timestamp - *t0));
      check(vs_realtime_submit(rt, &det), "submit");
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(2.0 * t_d));
    vs_realtime_stop(rt);
    std::size_t cycles = 0, overruns = 0;
    vs_realtime_stats(rt, &cycles, &overruns);
    std::cerr << "vservo: " << cycles << " cycles, " << overruns << " overruns\n";
    return 0;
  }

  vs_loop* loop = nullptr;
  check(vs_loop_create(profile.get(), &params, &loop), "loop");
  std::unique_ptr<vs_loop, decltype(&vs_loop_destroy)> guard(loop, &vs_loop_destroy);
  double t_d = 0, t_r = 0;
  std::size_t k = 0;
  vs_profile_timing(profile.get(), &t_d, &t_r, &k);
  std::vector<vs_sample> samples(k);
  // Lockstep: every frame is followed by one planning cycle.
  while (std::getline(*in, line)) {
    check(vs_parse_detection_line(line.c_str(), &det, &has), "detection line");
    if (!has) continue;
    check(vs_loop_submit(loop, &det), "submit");
    std::size_t n = 0;
    const vs_status s = vs_loop_cycle(loop, samples.data(), samples.size(), &n, nullptr);
    if (s != VS_OK && s != VS_ERR_NUMERICAL) die(s, "cycle");
    for (std::size_t i = 0; i < n; ++i) {
      print_sample(det.timestamp + static_cast<double>(i) * t_r, samples[i]);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vservo: visual servoing with a kinematically bounded quintic velocity planner"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool multi_profile) {
    if (multi_profile) {
      sub->add_option("--profile", o.profiles, "Profile file or built-in name (repeatable)")
          ->capture_default_str();
    } else {
      sub->add_option_function<std::string>(
             "--profile", [&](const std::string& p) { o.profiles = {p}; },
             "Profile file or built-in name (fast|slow)")
          ->default_str("fast");
    }
    sub->add_option("--scene", o.scene, "normal|clutter or a scene file")->capture_default_str();
    sub->add_option("--grid", o.grid, "small|large or a grid file")->capture_default_str();
    sub->add_option("--servo", o.servo, "Normalization/filter config file");
    sub->add_option("--seed", o.seed, "Noise seed")->capture_default_str();
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--duration", o.duration, "Episode length [s]")->capture_default_str();
    sub->add_flag("--cross-product", o.cross_product, "Pair every angle with every position");
    sub->add_flag("--first-crossing", o.first_crossing,
                  "Measure t_r/t_phi at the first threshold crossing");
    sub->add_flag("--noise-free", o.noise_free, "Disable all detector noise");
    sub->add_option("--jobs", o.jobs, "Episodes run in parallel")->capture_default_str();
  };

  auto* run = app.add_subcommand("run", "Run a single episode");
  common(run, false);
  run->add_option("--index", o.index, "Grid index of the initial pose")->capture_default_str();
  run->add_option("--pose", o.pose, "Initial pose: x_mm y_mm phi_deg")->expected(3);

  auto* suite = app.add_subcommand("suite", "Run every initial pose of a grid");
  common(suite, false);

  auto* sweep = app.add_subcommand("sweep", "Noise/profile sensitivity sweep");
  common(sweep, true);
  sweep->add_option("--sigmas", o.sigmas, "Center noise levels [px]")->capture_default_str();

  auto* stream = app.add_subcommand("stream", "Plan from a line-delimited detection stream");
  stream->add_option_function<std::string>(
             "--profile", [&](const std::string& p) { o.profiles = {p}; },
             "Profile file or built-in name")
      ->default_str("fast");
  stream->add_option("--input", o.input, "Detection stream file ('-' for stdin)")
      ->capture_default_str();
  stream->add_flag("--realtime", o.realtime, "Run the planner on wall-clock timers");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(o);
  if (*suite) return cmd_suite(o);
  if (*sweep) return cmd_sweep(o);
  if (*stream) return cmd_stream(o);
  return 0;
}
