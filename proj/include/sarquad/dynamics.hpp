#pragma once

// Rigid-body quadcopter plant.
//
// Frames: world is x east, y north, z up. The body frame is x forward, y left,
// z up, and attitude is a Z-Y-X Euler sequence (yaw, then pitch, then roll).
// With this convention a positive pitch tips the nose down and a positive
// roll lifts the left side.
//
// Motors sit in an X layout at 45 degrees to the body axes, indexed
// front-left, front-right, rear-left, rear-right. Front-right and rear-left
// spin so that their drag torque yaws the body counter-clockwise (+z).

#include "sarquad/common.hpp"

#include <array>
#include <optional>

namespace sarquad {

struct EulerAngles {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

struct QuadState {
    Vec3 position = Vec3::Zero();       ///< m, world frame
    Vec3 velocity = Vec3::Zero();       ///< m/s, world frame
    EulerAngles attitude;               ///< rad
    Vec3 angular_rates = Vec3::Zero();  ///< body rates (p, q, r), rad/s
    double time = 0.0;                  ///< s
};

enum Motor : std::size_t { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };

/// Normalized throttles in [0, 1], indexed by Motor.
struct MotorCommands {
    std::array<double, 4> u{};

    double mean() const { return 0.25 * (u[0] + u[1] + u[2] + u[3]); }
};

/// Physical constants of the default airframe. These are desk-scale values
/// picked for a ~1.2 kg quad, not measurements of any specific vehicle.
struct QuadParams {
    double mass = 1.2;             ///< kg
    double arm_length = 0.25;      ///< m, hub to motor
    double thrust_coeff = 6.0;     ///< N per unit throttle, per motor
    double torque_coeff = 0.12;    ///< N*m per unit throttle, per motor (yaw drag)
    Vec3 inertia{0.0123, 0.0123, 0.0224};  ///< kg*m^2, principal axes
    double gravity = 9.81;         ///< m/s^2
    double max_speed = 3.0;        ///< m/s, cruise cap
    double drag_coeff = 0.3;       ///< N*s/m, linear translational drag (0 disables)

    /// Throws InvalidArgument naming the offending field.
    void validate() const;

    /// Per-motor throttle that balances gravity when level.
    double hover_throttle() const { return mass * gravity / (4.0 * thrust_coeff); }
};

inline constexpr double kMaxPhysicsDt = 0.01;
inline constexpr double kGimbalGuard = 80.0 * kPi / 180.0;
inline constexpr double kCrashSpeed = 1.0;  ///< m/s at ground contact

/// Body-to-world rotation for Z-Y-X Euler angles.
Mat3 body_to_world(const EulerAngles& att);

/// Net body torque (roll, pitch, yaw) produced by the motors.
Vec3 motor_torques(const MotorCommands& cmds, const QuadParams& params);

/// World-frame linear acceleration from thrust, gravity and drag.
Vec3 linear_acceleration(const QuadState& state, const MotorCommands& cmds,
                         const QuadParams& params);

/// One semi-implicit Euler step without ground contact. Accepts any dt > 0.
QuadState step_rigid_body(const QuadState& state, const MotorCommands& cmds,
                          const QuadParams& params, double dt);

/// Clamps z to the ground plane and removes downward velocity.
/// Returns the vertical impact speed if contact occurred this step.
std::optional<double> apply_ground_contact(QuadState& state);

struct PlantStep {
    QuadState state;
    std::optional<double> impact_speed;  ///< set when the ground was touched
};

/// Rigid body plus ground contact, with the same checks as step_dynamics.
PlantStep step_plant(const QuadState& state, const MotorCommands& cmds,
                     const QuadParams& params, double dt);

/// Full plant step: rigid body, then ground contact. dt must be in (0, 0.01].
/// Throws InvalidArgument on bad inputs and SimulationDiverged when the
/// result is non-finite or |pitch| exceeds the gimbal guard.
QuadState step_dynamics(const QuadState& state, const MotorCommands& cmds,
                        const QuadParams& params, double dt);

/// X-configuration mixer. Inputs are throttle-unit corrections; outputs are
/// clamped to [0, 1].
MotorCommands motor_mixer(double base_throttle, double roll_u, double pitch_u, double yaw_u);

bool is_finite(const QuadState& state);

}  // namespace sarquad
