#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sarquad {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle) {
    double r = std::remainder(angle, kTwoPi);
    if (r <= -kPi) {
        r += kTwoPi;
    }
    return r;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// A precondition on an argument was violated.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The simulated vehicle left the envelope the model is valid in
/// (non-finite state or |pitch| beyond the gimbal-lock guard).
class SimulationDiverged : public std::runtime_error {
public:
    SimulationDiverged(const std::string& what, std::int64_t tick = -1)
        : std::runtime_error(what), tick_(tick) {}

    /// Physics tick at which divergence was detected, -1 if unknown.
    std::int64_t tick() const { return tick_; }

private:
    std::int64_t tick_;
};

/// A mission configuration could not be parsed or failed validation.
/// `key` names the offending setting when one is known; `line`/`column` are
/// 1-based and zero when the error is not tied to a position in the text.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::string reason, int line = 0, int column = 0);

    const std::string& key() const { return key_; }
    const std::string& reason() const { return reason_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::string key_;
    std::string reason_;
    int line_;
    int column_;
};

}  // namespace sarquad
