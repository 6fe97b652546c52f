#include "sarquad/control.hpp"

#include <algorithm>

namespace sarquad {

void PidGains::validate() const {
    if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0)) {
        throw InvalidArgument("pid gains must be >= 0");
    }
    if (!(integral_limit > 0.0 && output_limit > 0.0)) {
        throw InvalidArgument("pid limits must be > 0");
    }
}

PidResult pid_step(const PidGains& gains, const PidState& state, double error, double dt) {
    if (!(dt > 0.0)) {
        throw InvalidArgument("pid_step: dt must be > 0");
    }
    PidResult r;
    r.state.integral = std::clamp(state.integral + error * dt, -gains.integral_limit, gains.integral_limit);
    const double derivative = state.initialized ? (error - state.prev_error) / dt : 0.0;
    r.state.prev_error = error;
    r.state.initialized = true;
    const double raw = gains.kp * error + gains.ki * r.state.integral + gains.kd * derivative;
    r.output = std::clamp(raw, -gains.output_limit, gains.output_limit);
    return r;
}

ControlOutput control_step(const AttitudeEstimate& estimate, const Setpoints& setpoints,
                           const ControllerBank& bank, double hover_throttle,
                           const ControlTiming& timing) {
    ControlOutput out;
    out.bank = bank;

    const double roll_sp = std::clamp(setpoints.roll, -kMaxTiltSetpoint, kMaxTiltSetpoint);
    const double pitch_sp = std::clamp(setpoints.pitch, -kMaxTiltSetpoint, kMaxTiltSetpoint);

    auto run = [](PidChannel& ch, double error, double dt) {
        PidResult r = pid_step(ch.gains, ch.state, error, dt);
        ch.state = r.state;
        return r.output;
    };

    out.roll_u = run(out.bank.roll, roll_sp - estimate.roll, timing.dt);
    const double pitch_cmd = run(out.bank.pitch, pitch_sp - estimate.pitch, timing.dt);
    out.yaw_u = run(out.bank.yaw, wrap_angle(setpoints.yaw - estimate.yaw), timing.dt);
    if (timing.altitude_dt) {
        out.bank.altitude_output =
            run(out.bank.altitude, setpoints.altitude - estimate.altitude, *timing.altitude_dt);
    }

    out.pitch_u = -pitch_cmd;
    out.throttle = hover_throttle + out.bank.altitude_output;
    out.motors = motor_mixer(out.throttle, out.roll_u, out.pitch_u, out.yaw_u);
    return out;
}

ControlOutput control_step(const AttitudeEstimate& estimate, const Setpoints& setpoints,
                           const ControllerBank& bank, double hover_throttle, double dt) {
    return control_step(estimate, setpoints, bank, hover_throttle, ControlTiming{dt, dt});
}

}  // namespace sarquad
