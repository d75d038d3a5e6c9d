/* C interface to the vservo visual-servoing toolkit.
 *
 * All objects are opaque handles created by a *_create / *_load function
 * and released with the matching *_destroy. Every fallible call returns a
 * vs_status; on failure vs_last_error() holds a message for the calling
 * thread until its next failing call.
 *
 * Units: m/s, rad/s for velocities; mm and rad for poses; px for image
 * quantities; s for time.
 */
#ifndef VSERVO_VSERVO_H_
#define VSERVO_VSERVO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(VSERVO_BUILDING_LIBRARY)
#define VSERVO_API __declspec(dllexport)
#else
#define VSERVO_API __declspec(dllimport)
#endif
#else
#define VSERVO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vs_status {
  VS_OK = 0,
  VS_ERR_INVALID_ARGUMENT = 1,
  VS_ERR_NUMERICAL = 2,
  VS_ERR_CONFIG = 3,
  VS_ERR_IO = 4,
  VS_ERR_PARSE = 5,
  VS_ERR_BUFFER_TOO_SMALL = 6,
  VS_ERR_INTERNAL = 99
} vs_status;

VSERVO_API const char* vs_version(void);
VSERVO_API const char* vs_status_string(vs_status status);
VSERVO_API const char* vs_last_error(void);

typedef struct vs_limits {
  double v_max, a_max, j_max;             /* m/s, m/s^2, m/s^3 */
  double omega_max, alpha_max, zeta_max;  /* rad/s, rad/s^2, rad/s^3 */
} vs_limits;

typedef struct vs_sample {
  double v_x, v_y, omega;
} vs_sample;

typedef struct vs_detection {
  double timestamp;        /* s */
  double cx, cy;           /* px */
  double width, height;    /* px */
  double phi;              /* rad */
  int lost;                /* nonzero: no object in this frame, other fields ignored */
} vs_detection;

typedef struct vs_pose {
  double x_mm, y_mm, phi_rad;
} vs_pose;

typedef struct vs_servo_params {
  double u_r, u_phi;      /* vicinities, px and rad */
  double eps_r, eps_phi;  /* alignment thresholds, px and rad */
  size_t filter_size;
  int clamp;
  int lost_hold_cycles;
} vs_servo_params;

typedef struct vs_episode_summary {
  int converged;
  int has_t_r;
  double t_r;
  int has_t_phi;
  double t_phi;
  double mae_x_mm, mae_y_mm, mae_phi_deg;
  double max_overshoot;      /* pre-clamp */
  double max_emitted_ratio;  /* post-clamp */
  double final_x_mm, final_y_mm, final_phi_deg;
  size_t lost_detections;
  size_t numerical_failures;
} vs_episode_summary;

typedef struct vs_suite_summary {
  size_t episodes, converged;
  double mae_x_mm, mae_y_mm, mae_phi_deg;
  int has_t_r;
  double t_r;
  int has_t_phi;
  double t_phi;
  double max_overshoot;
  double max_emitted_ratio;
  char config_hash[17];
} vs_suite_summary;

VSERVO_API vs_status vs_servo_params_default(vs_servo_params* out);

/* ---- quintic planner ---------------------------------------------------- */

typedef struct vs_planner vs_planner;

VSERVO_API vs_status vs_planner_create(const vs_limits* limits, double t_d, double t_r,
                                       int clamp, vs_planner** out);
VSERVO_API void vs_planner_destroy(vs_planner* planner);
VSERVO_API size_t vs_planner_samples_per_cycle(const vs_planner* planner);
/* Plans one cycle from a filtered command (|r| <= 1, |phi| <= 1) and chains
 * the boundary. `out` must hold samples_per_cycle entries. */
VSERVO_API vs_status vs_planner_plan(vs_planner* planner, double r_x, double r_y, double phi,
                                     vs_sample* out, size_t capacity, size_t* written,
                                     double* overshoot);
VSERVO_API vs_status vs_planner_reset(vs_planner* planner);

/* Coefficients a0..a5 of the velocity quintic through (v, a, j) at t_s and t_t. */
VSERVO_API vs_status vs_quintic_solve(double t_s, double t_t, const double start[3],
                                      const double target[3], double coeffs[6]);

/* ---- robot profiles ----------------------------------------------------- */

typedef struct vs_profile vs_profile;

/* name: "fast" or "slow" */
VSERVO_API vs_status vs_profile_builtin(const char* name, vs_profile** out);
VSERVO_API vs_status vs_profile_load(const char* path, vs_profile** out);
VSERVO_API void vs_profile_destroy(vs_profile* profile);
VSERVO_API const char* vs_profile_name(const vs_profile* profile);
VSERVO_API vs_status vs_profile_limits(const vs_profile* profile, vs_limits* out);
VSERVO_API vs_status vs_profile_timing(const vs_profile* profile, double* t_d, double* t_r,
                                       size_t* k);

/* ---- simulated experiments ---------------------------------------------- */

typedef struct vs_experiment vs_experiment;

VSERVO_API vs_status vs_experiment_create(const vs_profile* profile, vs_experiment** out);
VSERVO_API void vs_experiment_destroy(vs_experiment* exp);
VSERVO_API vs_status vs_experiment_set_profile(vs_experiment* exp, const vs_profile* profile);
/* "normal" | "clutter"; resets the noise model to the scene defaults. */
VSERVO_API vs_status vs_experiment_set_scene(vs_experiment* exp, const char* name);
VSERVO_API vs_status vs_experiment_load_scene(vs_experiment* exp, const char* path);
VSERVO_API vs_status vs_experiment_set_noise(vs_experiment* exp, double sigma_center_px,
                                             double sigma_phi_rad, double outlier_prob,
                                             double outlier_radius_px);
/* "small" | "large" */
VSERVO_API vs_status vs_experiment_set_grid(vs_experiment* exp, const char* name);
VSERVO_API vs_status vs_experiment_load_grid(vs_experiment* exp, const char* path);
VSERVO_API vs_status vs_experiment_set_servo(vs_experiment* exp, const vs_servo_params* params);
VSERVO_API vs_status vs_experiment_load_servo(vs_experiment* exp, const char* path);
VSERVO_API vs_status vs_experiment_set_seed(vs_experiment* exp, uint64_t seed);
VSERVO_API vs_status vs_experiment_set_duration(vs_experiment* exp, double seconds);
VSERVO_API vs_status vs_experiment_set_cross_product(vs_experiment* exp, int enabled);
VSERVO_API vs_status vs_experiment_set_first_crossing(vs_experiment* exp, int enabled);
VSERVO_API vs_status vs_experiment_set_jobs(vs_experiment* exp, unsigned jobs);
VSERVO_API vs_status vs_experiment_grid_size(const vs_experiment* exp, size_t* out);
VSERVO_API vs_status vs_experiment_grid_pose(const vs_experiment* exp, size_t index,
                                             vs_pose* out);
/* Runs one episode from `initial`; writes the per-tick CSV when csv_path is
 * not NULL. */
VSERVO_API vs_status vs_experiment_run_episode(const vs_experiment* exp, const vs_pose* initial,
                                               const char* csv_path, vs_episode_summary* out);
/* Runs the whole grid; writes summary.csv, table.csv, manifest.json and
 * episodes/ under out_dir when it is not NULL. */
VSERVO_API vs_status vs_experiment_run_suite(const vs_experiment* exp, const char* out_dir,
                                             vs_suite_summary* out);
/* Reruns the suite for each profile and center-noise level; writes
 * sweep.csv under out_dir. */
VSERVO_API vs_status vs_experiment_run_sweep(const vs_experiment* exp,
                                             const vs_profile* const* profiles,
                                             size_t profile_count, const double* sigmas_px,
                                             size_t sigma_count, const char* out_dir);

/* ---- servo loop fed by an external detector ----------------------------- */

typedef struct vs_loop vs_loop;

VSERVO_API vs_status vs_loop_create(const vs_profile* profile, const vs_servo_params* params,
                                    vs_loop** out);
VSERVO_API void vs_loop_destroy(vs_loop* loop);
VSERVO_API vs_status vs_loop_submit(vs_loop* loop, const vs_detection* detection);
VSERVO_API vs_status vs_loop_command(const vs_loop* loop, double* r_x, double* r_y,
                                     double* phi);
VSERVO_API vs_status vs_loop_cycle(vs_loop* loop, vs_sample* out, size_t capacity,
                                   size_t* written, double* overshoot);

/* Parses one line of the detection stream format. *has_frame is 0 for blank
 * and comment lines. */
VSERVO_API vs_status vs_parse_detection_line(const char* line, vs_detection* out,
                                             int* has_frame);

/* ---- wall-clock runner -------------------------------------------------- */

typedef void (*vs_sample_callback)(double t, const vs_sample* sample, void* user);
typedef struct vs_realtime vs_realtime;

VSERVO_API vs_status vs_realtime_create(const vs_profile* profile, const vs_servo_params* params,
                                        vs_sample_callback callback, void* user,
                                        vs_realtime** out);
VSERVO_API void vs_realtime_destroy(vs_realtime* rt);
VSERVO_API vs_status vs_realtime_start(vs_realtime* rt);
VSERVO_API vs_status vs_realtime_stop(vs_realtime* rt);
VSERVO_API vs_status vs_realtime_submit(vs_realtime* rt, const vs_detection* detection);
VSERVO_API vs_status vs_realtime_stats(const vs_realtime* rt, size_t* cycles, size_t* overruns);

#ifdef __cplusplus
}
#endif

#endif /* VSERVO_VSERVO_H_ */
