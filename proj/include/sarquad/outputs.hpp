#pragma once

// On-disk artifacts of a run. Every file is written to a temporary sibling
// and renamed into place, so a failed run never leaves a truncated file.

#include "sarquad/mission.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace sarquad {

inline constexpr std::string_view kTelemetryHeader =
    "time_s,x,y,z,roll,pitch,yaw,est_roll,est_pitch,est_yaw,est_alt,u1,u2,u3,u4";
inline constexpr std::string_view kDetectionsHeader =
    "frame_index,sim_time_s,target_id,x_min,y_min,x_max,y_max,confidence,visibility";

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string telemetry_csv(const MissionResult& result);
/// Clutter detections carry target_id -1.
std::string detections_csv(const MissionResult& result);
/// `key = value` lines; absent values (no detection yet) read `none`.
std::string metrics_text(const MissionMetrics& metrics);

std::string sha256_hex(std::string_view data);

void write_atomic(const std::filesystem::path& path, std::string_view content);

struct RunManifest {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string version;
    std::string output_dir;
    std::map<std::string, std::string> checksums;  ///< file name -> sha256
};

/// Writes telemetry.csv, detections.csv, metrics.txt and, last,
/// manifest.json into `dir` (created if missing). Returns the manifest.
RunManifest write_run(const std::filesystem::path& dir, const MissionConfig& config,
                      const MissionResult& result, const std::string& config_path);

}  // namespace sarquad
