#include "sarquad/outputs.hpp"

#include "sarquad/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace sarquad {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string telemetry_csv(const MissionResult& result) {
    std::string out(kTelemetryHeader);
    out += '\n';
    for (const TelemetryRow& r : result.telemetry) {
        const double fields[] = {r.time,           r.position.x(),      r.position.y(),
                                 r.position.z(),   r.attitude.roll,     r.attitude.pitch,
                                 r.attitude.yaw,   r.estimate.roll,     r.estimate.pitch,
                                 r.estimate.yaw,   r.estimate.altitude, r.motors.u[0],
                                 r.motors.u[1],    r.motors.u[2],       r.motors.u[3]};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) out += ',';
            out += format_number(fields[i]);
        }
        out += '\n';
    }
    return out;
}

std::string detections_csv(const MissionResult& result) {
    std::string out(kDetectionsHeader);
    out += '\n';
    for (const DetectionEvent& e : result.detections) {
        const Detection& d = e.detection;
        out += std::to_string(e.frame_index) + ',' + format_number(e.sim_time) + ',' +
               std::to_string(d.target_id.value_or(-1)) + ',' + format_number(d.bbox.x_min) + ',' +
               format_number(d.bbox.y_min) + ',' + format_number(d.bbox.x_max) + ',' +
               format_number(d.bbox.y_max) + ',' + format_number(d.confidence) + ',' +
               format_number(d.visibility) + '\n';
    }
    return out;
}

std::string metrics_text(const MissionMetrics& m) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("none"); };
    std::string out;
    auto line = [&out](std::string_view key, const std::string& value) {
        out += std::string(key) + " = " + value + '\n';
    };
    line("targets_total", std::to_string(m.targets_total));
    line("targets_detected", std::to_string(m.targets_detected));
    line("time_to_first_detection", opt(m.time_to_first_detection));
    line("detections_emitted", std::to_string(m.detections_emitted));
    line("frames_captured", std::to_string(m.frames_captured));
    line("frames_processed", std::to_string(m.frames_processed));
    line("coverage_fraction", format_number(m.coverage_fraction));
    line("flight_time", format_number(m.flight_time));
    line("crashed", m.crashed ? "true" : "false");
    line("path_completed", m.path_completed ? "true" : "false");
    line("mean_confidence", format_number(m.mean_confidence));
    line("max_sighting_visibility", format_number(m.max_sighting_visibility));
    line("rms_roll_error", format_number(m.rms_roll_error));
    line("rms_pitch_error", format_number(m.rms_pitch_error));
    line("rms_altitude_error", format_number(m.rms_altitude_error));
    for (std::size_t i = 0; i < m.target_detection_times.size(); ++i) {
        line("target_detection_time." + std::to_string(i), opt(m.target_detection_times[i]));
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

RunManifest write_run(const std::filesystem::path& dir, const MissionConfig& config,
                      const MissionResult& result, const std::string& config_path) {
    std::filesystem::create_directories(dir);
    RunManifest manifest;
    manifest.config_path = config_path;
    manifest.seed = config.seed;
    manifest.version = SARQUAD_VERSION;
    manifest.output_dir = dir.string();

    const std::pair<std::string, std::string> files[] = {
        {"telemetry.csv", telemetry_csv(result)},
        {"detections.csv", detections_csv(result)},
        {"metrics.txt", metrics_text(result.metrics)},
    };
    for (const auto& [name, content] : files) {
        write_atomic(dir / name, content);
        manifest.checksums[name] = sha256_hex(content);
    }

    nlohmann::ordered_json j;
    j["config_path"] = manifest.config_path;
    j["seed"] = manifest.seed;
    j["version"] = manifest.version;
    j["output_dir"] = manifest.output_dir;
    j["detector"] = result.profile_name;
    nlohmann::ordered_json resolved = nlohmann::ordered_json::object();
    for (const auto& [key, value] : echo_config(config)) {
        resolved[key] = value;
    }
    j["config"] = resolved;
    nlohmann::ordered_json sums = nlohmann::ordered_json::object();
    for (const auto& [name, sum] : manifest.checksums) {
        sums[name] = {{"sha256", sum}};
    }
    j["files"] = sums;
    write_atomic(dir / "manifest.json", j.dump(2) + "\n");
    return manifest;
}

}  // namespace sarquad
