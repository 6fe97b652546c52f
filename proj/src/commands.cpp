#include "sarquad/commands.hpp"

#include "sarquad/config.hpp"
#include "sarquad/outputs.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

namespace sarquad {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

MissionConfig load(const CommandOptions& options) {
    MissionConfig config = parse_config(read_file(options.config_path));
    if (options.seed) {
        config.seed = *options.seed;
    }
    return config;
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string opt_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string("none");
}

// Shared error mapping for every subcommand.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const SimulationDiverged& e) {
        err << "simulation diverged: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace

std::filesystem::path resolve_output_dir(const CommandOptions& options) {
    if (options.out_dir) {
        return *options.out_dir;
    }
    const std::string stem = options.config_path.stem().string();
    if (const char* root = std::getenv("SAR_QUAD_OUT"); root && *root) {
        return std::filesystem::path(root) / stem;
    }
    return std::filesystem::path("sar_quad_out") / stem;
}

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const MissionConfig config = load(options);
        const MissionResult result = run_mission(config);
        const auto dir = resolve_output_dir(options);
        write_run(dir, config, result, options.config_path.string());
        out << metrics_text(result.metrics);
        out << "outputs written to " << dir.string() << '\n';
        return static_cast<int>(kExitOk);
    });
}

int cmd_compare(const CommandOptions& options, const std::vector<std::string>& profiles,
                std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const MissionConfig config = load(options);
        std::vector<DetectorProfile> chosen;
        for (const std::string& name : profiles) {
            auto p = preset_profile(name);
            if (!p) {
                throw ConfigError("--profiles", "unknown profile '" + name + "'");
            }
            // Keep any detector.* overrides only for the profile the file selected.
            chosen.push_back(name == config.detector.name ? config.detector : *p);
        }
        if (chosen.size() < 2) {
            throw ConfigError("--profiles", "need at least two profiles");
        }
        const std::vector<MissionResult> results = compare_profiles(config, chosen);
        const auto dir = resolve_output_dir(options);

        std::string table =
            "method,fps,sec_per_image,targets_detected,time_to_first_detection,frames_processed,"
            "detections_emitted,coverage_fraction\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            MissionConfig c = config;
            c.detector = chosen[i];
            write_run(dir / chosen[i].name, c, results[i], options.config_path.string());
            const MissionMetrics& m = results[i].metrics;
            table += chosen[i].name + ',' + fixed(throughput(chosen[i]), 3) + ',' +
                     format_number(chosen[i].seconds_per_image) + ',' +
                     std::to_string(m.targets_detected) + ',' + opt_number(m.time_to_first_detection) +
                     ',' + std::to_string(m.frames_processed) + ',' +
                     std::to_string(m.detections_emitted) + ',' + format_number(m.coverage_fraction) +
                     '\n';
        }
        write_atomic(dir / "comparison.csv", table);
        out << table;
        return static_cast<int>(kExitOk);
    });
}

int cmd_sweep(const CommandOptions& options, const std::string& param,
              const std::vector<std::string>& values, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (values.empty()) {
            throw ConfigError(param, "sweep needs at least one value");
        }
        const std::string text = read_file(options.config_path);
        std::vector<MissionConfig> configs;
        for (const std::string& v : values) {
            // Fresh parse per value; validate again once the override is in.
            MissionConfig c = parse_config(text);
            apply_override(c, param, v);
            c.validate();
            if (options.seed) c.seed = *options.seed;
            configs.push_back(std::move(c));
        }

        std::vector<std::future<MissionResult>> runs;
        for (const MissionConfig& c : configs) {
            runs.push_back(std::async(std::launch::async, [&c] { return run_mission(c); }));
        }
        std::vector<MissionResult> results;
        for (auto& f : runs) results.push_back(f.get());

        const auto dir = resolve_output_dir(options);
        std::string summary = param +
                              ",seed,targets_detected,time_to_first_detection,frames_processed,"
                              "coverage_fraction,flight_time,crashed,rms_roll_error,rms_pitch_error,"
                              "rms_altitude_error\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            write_run(dir / (param + "=" + values[i]), configs[i], results[i],
                      options.config_path.string());
            const MissionMetrics& m = results[i].metrics;
            summary += values[i] + ',' + std::to_string(configs[i].seed) + ',' +
                       std::to_string(m.targets_detected) + ',' + opt_number(m.time_to_first_detection) +
                       ',' + std::to_string(m.frames_processed) + ',' +
                       format_number(m.coverage_fraction) + ',' + format_number(m.flight_time) + ',' +
                       (m.crashed ? "true" : "false") + ',' + format_number(m.rms_roll_error) + ',' +
                       format_number(m.rms_pitch_error) + ',' + format_number(m.rms_altitude_error) +
                       '\n';
        }
        write_atomic(dir / "summary.csv", summary);
        out << summary;
        return static_cast<int>(kExitOk);
    });
}

}  // namespace sarquad
