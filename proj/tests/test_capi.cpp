// Exercises the shared library through its C interface only.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "vservo/vservo.h"

TEST_CASE("status strings and version") {
  CHECK(std::string(vs_version()).size() > 0);
  CHECK(std::string(vs_status_string(VS_OK)) == "ok");
  CHECK(std::string(vs_status_string(VS_ERR_NUMERICAL)).size() > 0);
}

TEST_CASE("null handles and bad arguments report errors") {
  vs_planner* p = nullptr;
  CHECK(vs_planner_create(nullptr, 1.0 / 60, 1.0 / 500, 1, &p) == VS_ERR_INVALID_ARGUMENT);
  vs_limits lim{0.25, 1, 5, 1, 4, 20};
  CHECK(vs_planner_create(&lim, 0.001, 0.002, 1, &p) == VS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(vs_last_error()) > 0);
  vs_profile* prof = nullptr;
  CHECK(vs_profile_builtin("nope", &prof) == VS_ERR_CONFIG);
  CHECK(vs_profile_load("/nonexistent/profile.json", &prof) == VS_ERR_IO);
  vs_planner_destroy(nullptr);
  vs_profile_destroy(nullptr);
}

TEST_CASE("quintic solve through the C API") {
  const double s[3] = {0, 0, 0}, t[3] = {1, 0, 0};
  double q[6];
  REQUIRE(vs_quintic_solve(0.0, 1.0, s, t, q) == VS_OK);
  const double expected[6] = {0, 0, 0, 10, -15, 6};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(q[i] - expected[i]) < 1e-9);
  CHECK(vs_quintic_solve(1.0, 1.0, s, t, q) == VS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("planner handle") {
  vs_limits lim{0.25, 1, 5, 1, 4, 20};
  vs_planner* p = nullptr;
  REQUIRE(vs_planner_create(&lim, 1.0 / 60, 1.0 / 500, 1, &p) == VS_OK);
  REQUIRE(vs_planner_samples_per_cycle(p) == 8);
  std::vector<vs_sample> out(8);
  std::size_t n = 0;
  double overshoot = 0;
  CHECK(vs_planner_plan(p, 1.0, 0.0, 0.0, out.data(), 4, &n, &overshoot) ==
        VS_ERR_BUFFER_TOO_SMALL);
  CHECK(vs_planner_plan(p, 2.0, 0.0, 0.0, out.data(), 8, &n, &overshoot) ==
        VS_ERR_INVALID_ARGUMENT);
  REQUIRE(vs_planner_plan(p, 1.0, 0.0, 0.5, out.data(), 8, &n, &overshoot) == VS_OK);
  CHECK(n == 8);
  CHECK(out[0].v_x == 0.0);
  CHECK(out[7].v_x > 0.0);
  CHECK(out[7].omega > 0.0);
  CHECK(vs_planner_reset(p) == VS_OK);
  vs_planner_destroy(p);
}

TEST_CASE("experiment handle runs an episode and a suite") {
  vs_profile* prof = nullptr;
  REQUIRE(vs_profile_builtin("fast", &prof) == VS_OK);
  CHECK(std::string(vs_profile_name(prof)) == "fast");
  double t_d = 0, t_r = 0;
  std::size_t k = 0;
  REQUIRE(vs_profile_timing(prof, &t_d, &t_r, &k) == VS_OK);
  CHECK(k == 8);

  vs_experiment* e = nullptr;
  REQUIRE(vs_experiment_create(prof, &e) == VS_OK);
  CHECK(vs_experiment_set_scene(e, "forest") == VS_ERR_CONFIG);
  REQUIRE(vs_experiment_set_noise(e, 0, 0, 0, 0) == VS_OK);
  REQUIRE(vs_experiment_set_duration(e, 5.0) == VS_OK);
  std::size_t size = 0;
  REQUIRE(vs_experiment_grid_size(e, &size) == VS_OK);
  CHECK(size == 11);
  vs_pose pose{};
  CHECK(vs_experiment_grid_pose(e, 11, &pose) == VS_ERR_INVALID_ARGUMENT);
  REQUIRE(vs_experiment_grid_pose(e, 2, &pose) == VS_OK);

  vs_episode_summary s{};
  REQUIRE(vs_experiment_run_episode(e, &pose, nullptr, &s) == VS_OK);
  CHECK(s.converged);
  CHECK(s.has_t_r);
  CHECK(s.max_emitted_ratio <= 1.0);

  const auto dir = std::filesystem::temp_directory_path() / "vservo_capi_suite";
  std::filesystem::remove_all(dir);
  vs_suite_summary suite{};
  REQUIRE(vs_experiment_set_jobs(e, 4) == VS_OK);
  REQUIRE(vs_experiment_run_suite(e, dir.string().c_str(), &suite) == VS_OK);
  CHECK(suite.episodes == 11);
  CHECK(suite.converged == 11);
  CHECK(std::strlen(suite.config_hash) == 16);
  CHECK(std::filesystem::exists(dir / "manifest.json"));

  vs_experiment_destroy(e);
  vs_profile_destroy(prof);
}

TEST_CASE("loop handle fed with parsed detection lines") {
  vs_profile* prof = nullptr;
  REQUIRE(vs_profile_builtin("fast", &prof) == VS_OK);
  vs_servo_params params{};
  REQUIRE(vs_servo_params_default(&params) == VS_OK);
  CHECK(params.filter_size == 5);
  vs_loop* loop = nullptr;
  REQUIRE(vs_loop_create(prof, &params, &loop) == VS_OK);

  vs_detection det{};
  int has = 0;
  REQUIRE(vs_parse_detection_line("# header", &det, &has) == VS_OK);
  CHECK(has == 0);
  CHECK(vs_parse_detection_line("0,1,2", &det, &has) == VS_ERR_PARSE);
  REQUIRE(vs_parse_detection_line("0.0,1460,720,400,200,0", &det, &has) == VS_OK);
  REQUIRE(has == 1);
  REQUIRE(vs_loop_submit(loop, &det) == VS_OK);
  double rx = 0, ry = 0, phi = 0;
  REQUIRE(vs_loop_command(loop, &rx, &ry, &phi) == VS_OK);
  CHECK(rx == doctest::Approx(-1.0));

  std::vector<vs_sample> out(8);
  std::size_t n = 0;
  REQUIRE(vs_loop_cycle(loop, out.data(), out.size(), &n, nullptr) == VS_OK);
  CHECK(n == 8);
  CHECK(out[7].v_x < 0.0);

  REQUIRE(vs_parse_detection_line("0.1,lost", &det, &has) == VS_OK);
  CHECK(det.lost != 0);
  CHECK(vs_loop_submit(loop, &det) == VS_OK);

  vs_loop_destroy(loop);
  vs_profile_destroy(prof);
}
