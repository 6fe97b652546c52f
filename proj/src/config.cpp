#include "sarquad/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace sarquad {

ConfigError::ConfigError(std::string key, std::string reason, int line, int column)
    : std::runtime_error([&] {
          std::string msg;
          if (line > 0) {
              msg = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
          }
          if (!key.empty()) {
              msg += key + ": ";
          }
          return msg + reason;
      }()),
      key_(std::move(key)),
      reason_(std::move(reason)),
      line_(line),
      column_(column) {}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError(std::string(key), "expected an integer, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError(std::string(key),
                          "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto stop = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(trim(text.substr(start, stop - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

struct KeySpec {
    std::function<void(MissionConfig&, std::string_view key, std::string_view value)> set;
    std::function<std::string(const MissionConfig&)> get;
};

using Registry = std::vector<std::pair<std::string, KeySpec>>;

template <typename Field>
KeySpec number(Field field) {
    return {[field](MissionConfig& c, std::string_view k, std::string_view v) {
                field(c) = parse_double(k, v);
            },
            [field](const MissionConfig& c) {
                return format_double(field(const_cast<MissionConfig&>(c)));
            }};
}

template <typename Field>
KeySpec degrees(Field field) {
    return {[field](MissionConfig& c, std::string_view k, std::string_view v) {
                field(c) = deg_to_rad(parse_double(k, v));
            },
            [field](const MissionConfig& c) {
                return format_double(field(const_cast<MissionConfig&>(c)) * 180.0 / kPi);
            }};
}

template <typename Field>
KeySpec integer(Field field) {
    return {[field](MissionConfig& c, std::string_view k, std::string_view v) {
                const std::int64_t n = parse_int(k, v);
                if (n < 1 || n > 100000) {
                    throw ConfigError(std::string(k), "must be in [1, 100000]");
                }
                field(c) = static_cast<int>(n);
            },
            [field](const MissionConfig& c) {
                return std::to_string(field(const_cast<MissionConfig&>(c)));
            }};
}

template <typename Field>
KeySpec boolean(Field field) {
    return {[field](MissionConfig& c, std::string_view k, std::string_view v) {
                field(c) = parse_bool(k, v);
            },
            [field](const MissionConfig& c) {
                return std::string(field(const_cast<MissionConfig&>(c)) ? "true" : "false");
            }};
}

template <typename Field>
KeySpec double_list(Field field) {
    return {[field](MissionConfig& c, std::string_view k, std::string_view v) {
                std::vector<double> out;
                for (const std::string& item : split_list(v)) out.push_back(parse_double(k, item));
                field(c) = std::move(out);
            },
            [field](const MissionConfig& c) { return join(field(const_cast<MissionConfig&>(c))); }};
}

template <typename Field>
KeySpec int_list(Field field) {
    return {[field](MissionConfig& c, std::string_view k, std::string_view v) {
                std::vector<int> out;
                for (const std::string& item : split_list(v)) {
                    out.push_back(static_cast<int>(parse_int(k, item)));
                }
                field(c) = std::move(out);
            },
            [field](const MissionConfig& c) { return join(field(const_cast<MissionConfig&>(c))); }};
}

#define FIELD(expr) [](MissionConfig & c) -> auto& { return expr; }

void add_pid(Registry& r, const std::string& axis, PidChannel ControllerBank::*channel) {
    auto gains = [channel](MissionConfig& c) -> PidGains& { return (c.flight.controllers.*channel).gains; };
    r.emplace_back("pid." + axis + ".kp", number([gains](MissionConfig& c) -> double& { return gains(c).kp; }));
    r.emplace_back("pid." + axis + ".ki", number([gains](MissionConfig& c) -> double& { return gains(c).ki; }));
    r.emplace_back("pid." + axis + ".kd", number([gains](MissionConfig& c) -> double& { return gains(c).kd; }));
    r.emplace_back("pid." + axis + ".integral_limit",
                   number([gains](MissionConfig& c) -> double& { return gains(c).integral_limit; }));
    r.emplace_back("pid." + axis + ".output_limit",
                   number([gains](MissionConfig& c) -> double& { return gains(c).output_limit; }));
}

Registry build_registry() {
    Registry r;
    r.emplace_back("detector",
                   KeySpec{[](MissionConfig& c, std::string_view k, std::string_view v) {
                               auto p = preset_profile(v);
                               if (!p) {
                                   throw ConfigError(std::string(k), "unknown detector preset '" +
                                                                         std::string(v) +
                                                                         "' (expected ssd, haar or hog)");
                               }
                               c.detector = *p;
                           },
                           [](const MissionConfig& c) { return c.detector.name; }});
    r.emplace_back("detector.seconds_per_image", number(FIELD(c.detector.seconds_per_image)));
    r.emplace_back("detector.recall_full", number(FIELD(c.detector.recall_full)));
    r.emplace_back("detector.recall_partial", number(FIELD(c.detector.recall_partial)));
    r.emplace_back("detector.confidence_mean", number(FIELD(c.detector.confidence_mean)));
    r.emplace_back("detector.confidence_std", number(FIELD(c.detector.confidence_std)));
    r.emplace_back("detector.visibility_threshold", number(FIELD(c.detector.visibility_threshold)));
    r.emplace_back("detector.false_positive_rate", number(FIELD(c.detector.false_positive_rate)));
    r.emplace_back("detector.confidence_floor", number(FIELD(c.confidence_floor)));
    r.emplace_back("detector.match_iou", number(FIELD(c.match_iou)));
    r.emplace_back("nms.iou_threshold", number(FIELD(c.nms_iou_threshold)));

    r.emplace_back("world.width", number(FIELD(c.world.width)));
    r.emplace_back("world.height", number(FIELD(c.world.height)));
    r.emplace_back("spawn.x", number(FIELD(c.spawn.x())));
    r.emplace_back("spawn.y", number(FIELD(c.spawn.y())));
    r.emplace_back("search_altitude", number(FIELD(c.search_altitude)));
    r.emplace_back("cruise_speed", number(FIELD(c.cruise_speed)));
    r.emplace_back("endurance", number(FIELD(c.endurance)));
    r.emplace_back("swath_overlap", number(FIELD(c.swath_overlap)));
    r.emplace_back("seed", KeySpec{[](MissionConfig& c, std::string_view k, std::string_view v) {
                                       c.seed = parse_uint(k, v);
                                   },
                                   [](const MissionConfig& c) { return std::to_string(c.seed); }});
    r.emplace_back("record_telemetry", boolean(FIELD(c.record_telemetry)));

    r.emplace_back("physics_dt", number(FIELD(c.flight.physics_dt)));
    r.emplace_back("imu_rate", number(FIELD(c.flight.imu_rate)));
    r.emplace_back("control_rate", number(FIELD(c.flight.control_rate)));
    r.emplace_back("ultrasonic_rate", number(FIELD(c.flight.ultrasonic_rate)));
    r.emplace_back("accel_compensation", boolean(FIELD(c.flight.accel_compensation)));

    add_pid(r, "roll", &ControllerBank::roll);
    add_pid(r, "pitch", &ControllerBank::pitch);
    add_pid(r, "yaw", &ControllerBank::yaw);
    add_pid(r, "altitude", &ControllerBank::altitude);

    r.emplace_back("filter.alpha", number(FIELD(c.flight.filter.alpha)));
    r.emplace_back("filter.accel_mag_min", number(FIELD(c.flight.filter.accel_mag_min)));
    r.emplace_back("filter.accel_mag_max", number(FIELD(c.flight.filter.accel_mag_max)));
    r.emplace_back("filter.altitude_lpf_coeff", number(FIELD(c.flight.filter.altitude_lpf_coeff)));

    r.emplace_back("quad.mass", number(FIELD(c.flight.quad.mass)));
    r.emplace_back("quad.arm_length", number(FIELD(c.flight.quad.arm_length)));
    r.emplace_back("quad.thrust_coeff", number(FIELD(c.flight.quad.thrust_coeff)));
    r.emplace_back("quad.torque_coeff", number(FIELD(c.flight.quad.torque_coeff)));
    r.emplace_back("quad.inertia_x", number(FIELD(c.flight.quad.inertia.x())));
    r.emplace_back("quad.inertia_y", number(FIELD(c.flight.quad.inertia.y())));
    r.emplace_back("quad.inertia_z", number(FIELD(c.flight.quad.inertia.z())));
    r.emplace_back("quad.gravity", number(FIELD(c.flight.quad.gravity)));
    r.emplace_back("quad.max_speed", number(FIELD(c.flight.quad.max_speed)));
    r.emplace_back("quad.drag_coeff", number(FIELD(c.flight.quad.drag_coeff)));

    r.emplace_back("gyro.bias_x", number(FIELD(c.flight.gyro.bias0.x())));
    r.emplace_back("gyro.bias_y", number(FIELD(c.flight.gyro.bias0.y())));
    r.emplace_back("gyro.bias_z", number(FIELD(c.flight.gyro.bias0.z())));
    r.emplace_back("gyro.bias_random_walk_std", number(FIELD(c.flight.gyro.bias_random_walk_std)));
    r.emplace_back("gyro.white_noise_std", number(FIELD(c.flight.gyro.white_noise_std)));

    r.emplace_back("accel.white_noise_std", number(FIELD(c.flight.accel.white_noise_std)));
    r.emplace_back("accel.vibration_amplitude_per_throttle",
                   number(FIELD(c.flight.accel.vibration_amplitude_per_throttle)));
    r.emplace_back("accel.vibration_freq", number(FIELD(c.flight.accel.vibration_freq)));
    r.emplace_back("accel.spike_probability", number(FIELD(c.flight.accel.spike_probability)));
    r.emplace_back("accel.spike_scale", number(FIELD(c.flight.accel.spike_scale)));

    r.emplace_back("ultrasonic.sound_speed", number(FIELD(c.flight.ultrasonic.sound_speed)));
    r.emplace_back("ultrasonic.echo_noise_std", number(FIELD(c.flight.ultrasonic.echo_noise_std)));
    r.emplace_back("ultrasonic.max_range", number(FIELD(c.flight.ultrasonic.max_range)));
    r.emplace_back("ultrasonic.dropout_probability", number(FIELD(c.flight.ultrasonic.dropout_probability)));

    r.emplace_back("camera.width_px", integer(FIELD(c.camera.width_px)));
    r.emplace_back("camera.height_px", integer(FIELD(c.camera.height_px)));
    r.emplace_back("camera.frame_rate_hz", number(FIELD(c.camera.frame_rate_hz)));
    r.emplace_back("camera.hfov_deg", degrees(FIELD(c.camera.hfov)));
    r.emplace_back("camera.vfov_deg", degrees(FIELD(c.camera.vfov)));

    r.emplace_back("boxes.grid_sizes", int_list(FIELD(c.boxes.grid_sizes)));
    r.emplace_back("boxes.scales", double_list(FIELD(c.boxes.scales)));
    r.emplace_back("boxes.aspect_ratios", double_list(FIELD(c.boxes.aspect_ratios)));

    r.emplace_back("guidance.max_tilt", number(FIELD(c.guidance.max_tilt)));
    r.emplace_back("guidance.position_gain", number(FIELD(c.guidance.position_gain)));
    r.emplace_back("guidance.velocity_gain", number(FIELD(c.guidance.velocity_gain)));
    r.emplace_back("guidance.max_accel", number(FIELD(c.guidance.max_accel)));
    r.emplace_back("guidance.acceptance_radius", number(FIELD(c.guidance.acceptance_radius)));
    r.emplace_back("guidance.takeoff_tolerance", number(FIELD(c.guidance.takeoff_tolerance)));
    return r;
}

#undef FIELD

const Registry& registry() {
    static const Registry r = build_registry();
    return r;
}

const KeySpec* find_key(std::string_view key) {
    for (const auto& [name, spec] : registry()) {
        if (name == key) return &spec;
    }
    return nullptr;
}

const std::vector<std::string> kTargetFields{"x", "y", "width", "length", "partial"};

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

[[noreturn]] void unknown_key(std::string_view key) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& [name, spec] : registry()) {
        const std::size_t d = edit_distance(key, name);
        if (d < best_d) {
            best_d = d;
            best = name;
        }
    }
    std::string reason = "unknown key";
    if (best_d <= std::max<std::size_t>(2, key.size() / 4)) {
        reason += " (did you mean '" + best + "'?)";
    }
    throw ConfigError(std::string(key), reason);
}

GroundTarget& target_slot(MissionConfig& c, int id) {
    for (GroundTarget& t : c.targets) {
        if (t.id == id) return t;
    }
    GroundTarget t;
    t.id = id;
    c.targets.push_back(t);
    return c.targets.back();
}

bool apply_target(MissionConfig& c, std::string_view key, std::string_view value) {
    constexpr std::string_view prefix = "target.";
    if (key.substr(0, prefix.size()) != prefix) return false;
    const std::string_view rest = key.substr(prefix.size());
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) {
        throw ConfigError(std::string(key), "expected target.<id>.<field>");
    }
    const std::string_view id_text = rest.substr(0, dot);
    const std::string_view field = rest.substr(dot + 1);
    int id = 0;
    const auto res = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (id_text.empty() || res.ec != std::errc{} || res.ptr != id_text.data() + id_text.size() || id < 0) {
        throw ConfigError(std::string(key), "target id must be a non-negative integer");
    }
    GroundTarget& t = target_slot(c, id);
    if (field == "x") t.position.x() = parse_double(key, value);
    else if (field == "y") t.position.y() = parse_double(key, value);
    else if (field == "width") t.width = parse_double(key, value);
    else if (field == "length") t.length = parse_double(key, value);
    else if (field == "partial") t.partial = parse_bool(key, value);
    else {
        throw ConfigError(std::string(key), "unknown target field (expected x, y, width, length or partial)");
    }
    return true;
}

struct Assignment {
    std::string key;
    std::string value;
    int line;
    int key_column;
    int value_column;
};

}  // namespace

void apply_override(MissionConfig& config, std::string_view key, std::string_view value) {
    if (apply_target(config, key, value)) return;
    const KeySpec* spec = find_key(key);
    if (!spec) unknown_key(key);
    spec->set(config, key, value);
}

MissionConfig parse_config(std::string_view text) {
    std::vector<Assignment> assignments;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            const auto col = static_cast<int>(line.find_first_not_of(" \t") + 1);
            throw ConfigError("", "expected 'key = value'", line_no, col);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("", "missing key before '='", line_no, static_cast<int>(eq + 1));
        }
        if (key.find_first_of(" \t") != std::string::npos) {
            throw ConfigError(key, "keys may not contain whitespace", line_no,
                              static_cast<int>(line.find_first_not_of(" \t") + 1));
        }
        const auto vstart = line.find_first_not_of(" \t", eq + 1);
        const int vcol = static_cast<int>((vstart == std::string_view::npos ? eq + 1 : vstart) + 1);
        if (value.empty()) {
            throw ConfigError(key, "missing value", line_no, vcol);
        }
        if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
            throw ConfigError(key, "duplicate key (first set on line " + std::to_string(it->second) + ")",
                              line_no, static_cast<int>(line.find_first_not_of(" \t") + 1));
        }
        assignments.push_back(
            {key, value, line_no, static_cast<int>(line.find_first_not_of(" \t") + 1), vcol});
    }

    std::stable_partition(assignments.begin(), assignments.end(),
                          [](const Assignment& a) { return a.key == "detector"; });

    MissionConfig config;
    for (const Assignment& a : assignments) {
        try {
            apply_override(config, a.key, a.value);
        } catch (const ConfigError& e) {
            const bool bad_key = e.reason().rfind("unknown", 0) == 0 || e.reason().rfind("expected target", 0) == 0 ||
                                 e.reason().rfind("target id", 0) == 0;
            throw ConfigError(e.key(), e.reason(), a.line, bad_key ? a.key_column : a.value_column);
        }
    }
    std::sort(config.targets.begin(), config.targets.end(),
              [](const GroundTarget& a, const GroundTarget& b) { return a.id < b.id; });

    try {
        config.validate();
    } catch (const ConfigError& e) {
        // Point at the line that set the key, or at the first line under it.
        int line = 0, column = 0;
        for (const Assignment& a : assignments) {
            if (a.key == e.key() || a.key.rfind(e.key() + ".", 0) == 0) {
                if (line == 0 || a.line < line) {
                    line = a.line;
                    column = a.value_column;
                }
            }
        }
        throw ConfigError(e.key(), e.reason(), line, column);
    }
    return config;
}

std::vector<std::pair<std::string, std::string>> echo_config(const MissionConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, spec] : registry()) {
        out.emplace_back(name, spec.get(config));
    }
    for (const GroundTarget& t : config.targets) {
        const std::string p = "target." + std::to_string(t.id) + ".";
        out.emplace_back(p + "x", format_double(t.position.x()));
        out.emplace_back(p + "y", format_double(t.position.y()));
        out.emplace_back(p + "width", format_double(t.width));
        out.emplace_back(p + "length", format_double(t.length));
        out.emplace_back(p + "partial", t.partial ? "true" : "false");
    }
    return out;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> out;
    for (const auto& [name, spec] : registry()) out.push_back(name);
    return out;
}

}  // namespace sarquad
