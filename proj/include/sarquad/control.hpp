#pragma once

#include "sarquad/dynamics.hpp"
#include "sarquad/estimation.hpp"

#include <optional>

namespace sarquad {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double integral_limit = 1.0;
    double output_limit = 1.0;

    void validate() const;
};

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool initialized = false;
};

struct PidResult {
    double output = 0.0;
    PidState state;
};

/// Textbook PID with derivative on error, a clamped integral, and a clamped
/// output. The derivative term is zero on the first call.
PidResult pid_step(const PidGains& gains, const PidState& state, double error, double dt);

inline constexpr double kMaxTiltSetpoint = 0.5;  ///< rad

struct Setpoints {
    double roll = 0.0;   ///< rad, clamped to +-0.5
    double pitch = 0.0;  ///< rad, clamped to +-0.5
    double yaw = 0.0;    ///< rad
    double altitude = 0.0;  ///< m
};

struct PidChannel {
    PidGains gains;
    PidState state;
};

/// The four single-loop controllers of the flight stack, with the gains
/// committed from tools/tune_gains against the default QuadParams.
struct ControllerBank {
    PidChannel roll{{0.16, 0.0, 0.035, 0.5, 0.2}, {}};
    PidChannel pitch{{0.16, 0.0, 0.035, 0.5, 0.2}, {}};
    PidChannel yaw{{0.5, 0.0, 0.2, 0.5, 0.15}, {}};
    PidChannel altitude{{0.35, 0.02, 0.2, 0.5, 0.3}, {}};
    /// Altitude correction held between altitude-loop ticks.
    double altitude_output = 0.0;
};

struct ControlTiming {
    double dt = 1.0 / 250.0;  ///< attitude loop period
    /// Set on ticks that carry a fresh altitude estimate; unset holds the
    /// previous altitude correction (zero-order hold).
    std::optional<double> altitude_dt = 1.0 / 250.0;
};

struct ControlOutput {
    MotorCommands motors;
    double throttle = 0.0;  ///< base throttle before mixing
    double roll_u = 0.0;
    double pitch_u = 0.0;   ///< as fed to the mixer
    double yaw_u = 0.0;
    ControllerBank bank;    ///< updated controller states
};

/// Runs the roll, pitch, yaw and altitude loops on (setpoint - estimate) and
/// mixes the result. The yaw error is wrapped into (-pi, pi] first.
///
/// The mixer's pitch input raises the front motor pair, which tips the nose
/// up; in the z-up body frame that is a negative pitch, so the pitch loop's
/// output enters the mixer negated.
ControlOutput control_step(const AttitudeEstimate& estimate, const Setpoints& setpoints,
                           const ControllerBank& bank, double hover_throttle,
                           const ControlTiming& timing);

/// All four loops at the same period.
ControlOutput control_step(const AttitudeEstimate& estimate, const Setpoints& setpoints,
                           const ControllerBank& bank, double hover_throttle, double dt);

}  // namespace sarquad
