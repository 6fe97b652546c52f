#include "sarquad/dynamics.hpp"

#include <algorithm>

namespace sarquad {

void QuadParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidArgument(std::string("quad.") + name + " must be > 0");
        }
    };
    positive(mass, "mass");
    positive(arm_length, "arm_length");
    positive(thrust_coeff, "thrust_coeff");
    positive(torque_coeff, "torque_coeff");
    positive(inertia.x(), "inertia.x");
    positive(inertia.y(), "inertia.y");
    positive(inertia.z(), "inertia.z");
    positive(gravity, "gravity");
    positive(max_speed, "max_speed");
    if (!(drag_coeff >= 0.0) || !std::isfinite(drag_coeff)) {
        throw InvalidArgument("quad.drag_coeff must be >= 0");
    }
}

Mat3 body_to_world(const EulerAngles& att) {
    const double cr = std::cos(att.roll), sr = std::sin(att.roll);
    const double cp = std::cos(att.pitch), sp = std::sin(att.pitch);
    const double cy = std::cos(att.yaw), sy = std::sin(att.yaw);
    Mat3 r;
    r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
         sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
         -sp,     cp * sr,                cp * cr;
    return r;
}

Vec3 motor_torques(const MotorCommands& cmds, const QuadParams& params) {
    const auto& u = cmds.u;
    const double lever = params.arm_length / std::numbers::sqrt2;
    const double kt = params.thrust_coeff;
    // tau = r x F with F along +z: tau_x = y*F, tau_y = -x*F.
    const double roll = lever * kt * (u[kFrontLeft] + u[kRearLeft] - u[kFrontRight] - u[kRearRight]);
    const double pitch = lever * kt * (u[kRearLeft] + u[kRearRight] - u[kFrontLeft] - u[kFrontRight]);
    const double yaw = params.torque_coeff * (u[kFrontRight] + u[kRearLeft] - u[kFrontLeft] - u[kRearRight]);
    return {roll, pitch, yaw};
}

Vec3 linear_acceleration(const QuadState& state, const MotorCommands& cmds,
                         const QuadParams& params) {
    const double thrust = params.thrust_coeff * (cmds.u[0] + cmds.u[1] + cmds.u[2] + cmds.u[3]);
    const Vec3 thrust_world = body_to_world(state.attitude).col(2) * thrust;
    Vec3 force = thrust_world - params.drag_coeff * state.velocity;
    force.z() -= params.mass * params.gravity;
    return force / params.mass;
}

QuadState step_rigid_body(const QuadState& state, const MotorCommands& cmds,
                          const QuadParams& params, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidArgument("dt must be > 0");
    }
    if (!is_finite(state)) {
        throw InvalidArgument("state must be finite");
    }

    MotorCommands clamped = cmds;
    for (double& u : clamped.u) {
        u = std::clamp(u, 0.0, 1.0);
    }

    QuadState next = state;
    next.velocity = state.velocity + linear_acceleration(state, clamped, params) * dt;
    next.position = state.position + next.velocity * dt;

    const Vec3& w = state.angular_rates;
    const Vec3& inertia = params.inertia;
    const Vec3 torque = motor_torques(clamped, params);
    const Vec3 gyroscopic = w.cross(inertia.cwiseProduct(w));
    next.angular_rates = w + (torque - gyroscopic).cwiseQuotient(inertia) * dt;

    // Near-hover kinematics: Euler rates taken equal to body rates.
    next.attitude.roll = wrap_angle(state.attitude.roll + next.angular_rates.x() * dt);
    next.attitude.pitch = wrap_angle(state.attitude.pitch + next.angular_rates.y() * dt);
    next.attitude.yaw = wrap_angle(state.attitude.yaw + next.angular_rates.z() * dt);
    next.time = state.time + dt;
    return next;
}

std::optional<double> apply_ground_contact(QuadState& state) {
    if (state.position.z() > 0.0) {
        return std::nullopt;
    }
    const double impact = std::max(0.0, -state.velocity.z());
    state.position.z() = 0.0;
    state.velocity.z() = std::max(0.0, state.velocity.z());
    return impact;
}

PlantStep step_plant(const QuadState& state, const MotorCommands& cmds,
                     const QuadParams& params, double dt) {
    if (!(dt > 0.0) || dt > kMaxPhysicsDt) {
        throw InvalidArgument("dt must be in (0, 0.01]");
    }
    PlantStep out{step_rigid_body(state, cmds, params, dt), std::nullopt};
    out.impact_speed = apply_ground_contact(out.state);
    if (!is_finite(out.state)) {
        throw SimulationDiverged("non-finite vehicle state");
    }
    if (std::abs(out.state.attitude.pitch) > kGimbalGuard) {
        throw SimulationDiverged("pitch beyond 80 degrees");
    }
    return out;
}

QuadState step_dynamics(const QuadState& state, const MotorCommands& cmds,
                        const QuadParams& params, double dt) {
    return step_plant(state, cmds, params, dt).state;
}

MotorCommands motor_mixer(double base_throttle, double roll_u, double pitch_u, double yaw_u) {
    const double t = base_throttle, r = roll_u, p = pitch_u, y = yaw_u;
    MotorCommands out;
    out.u[kFrontLeft] = t + r + p - y;
    out.u[kFrontRight] = t - r + p + y;
    out.u[kRearLeft] = t + r - p + y;
    out.u[kRearRight] = t - r - p - y;
    for (double& u : out.u) {
        u = std::isfinite(u) ? std::clamp(u, 0.0, 1.0) : 0.0;
    }
    return out;
}

bool is_finite(const QuadState& s) {
    return s.position.allFinite() && s.velocity.allFinite() && s.angular_rates.allFinite() &&
           std::isfinite(s.attitude.roll) && std::isfinite(s.attitude.pitch) &&
           std::isfinite(s.attitude.yaw) && std::isfinite(s.time);
}

}  // namespace sarquad
