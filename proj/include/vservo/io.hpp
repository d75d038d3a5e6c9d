#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vservo/harness.hpp"

namespace vservo::io {

using nlohmann::json;

// Config files are JSON objects. Every key is optional (defaults apply) but
// unknown keys are rejected. Units: m, s, rad, px, mm.

RobotProfile profile_from_json(const json& j);
json to_json(const RobotProfile& profile);
RobotProfile load_profile(const std::filesystem::path& path);

SceneConfig scene_from_json(const json& j);
json to_json(const SceneConfig& scene);
SceneConfig load_scene(const std::filesystem::path& path);

ExperimentGrid grid_from_json(const json& j);
json to_json(const ExperimentGrid& grid);
ExperimentGrid load_grid(const std::filesystem::path& path);

LoopConfig loop_from_json(const json& j);
json to_json(const LoopConfig& loop);
LoopConfig load_loop(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);

/// Shortest round-trip decimal, locale independent.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

/// Per-tick CSV, one line per EpisodeRow.
inline constexpr const char* kEpisodeHeader =
    "t,rn_x,rn_y,phi_n,pixel_error,err_x_mm,err_y_mm,err_phi_deg,v_x,v_y,omega,overshoot";
void write_episode_csv(std::ostream& os, const EpisodeRecord& record);
void write_episode_csv(const std::filesystem::path& path, const EpisodeRecord& record);
/// Parses what write_episode_csv produced back into rows.
std::vector<EpisodeRow> read_episode_csv(std::istream& is);

inline constexpr const char* kSummaryHeader =
    "index,x0_mm,y0_mm,phi0_deg,converged,mae_x_mm,mae_y_mm,mae_phi_deg,t_r_s,t_phi_s,"
    "speed_mm_s,speed_rad_s,max_overshoot,max_emitted_ratio,lost_detections,numerical_failures";
/// One row per episode followed by a "mean" row.
void write_summary_csv(std::ostream& os, const SuiteResult& result);

/// Results-table layout: one metric per line, one column for this run.
void write_table_csv(std::ostream& os, const SuiteConfig& config, const SuiteResult& result);

/// Canonical description of a suite run.
json manifest(const SuiteConfig& config, const std::string& command);
/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_hash(const json& canonical);

/// Writes summary.csv, table.csv, manifest.json and episodes/episode_NNN.csv.
void write_suite(const std::filesystem::path& dir, const SuiteConfig& config,
                 const SuiteResult& result, const std::string& command = "suite");

inline constexpr const char* kSweepHeader =
    "profile,sigma_center_px,sigma_phi_deg,episodes,converged,mae_x_mm,mae_y_mm,mae_phi_deg,"
    "t_r_s,t_phi_s,max_overshoot,max_emitted_ratio";
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);

}  // namespace vservo::io
