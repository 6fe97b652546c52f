#include "sarquad/dynamics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sarquad;

namespace {

MotorCommands uniform_cmds(double u) { return MotorCommands{{u, u, u, u}}; }

QuadState airborne(double z) {
    QuadState s;
    s.position = Vec3(0.0, 0.0, z);
    return s;
}

}  // namespace

TEST(Dynamics, HoverIsForceBalanced) {
    QuadParams p;
    const QuadState s0 = airborne(5.0);
    const QuadState s1 = step_dynamics(s0, uniform_cmds(p.hover_throttle()), p, 0.001);
    EXPECT_NEAR((s1.velocity).norm(), 0.0, 1e-12);
    EXPECT_NEAR((s1.position - s0.position).norm(), 0.0, 1e-12);
    EXPECT_NEAR(s1.angular_rates.norm(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(s1.time, 0.001);
}

TEST(Dynamics, HoverThrustPerMotor) {
    QuadParams p;
    EXPECT_NEAR(4.0 * p.thrust_coeff * p.hover_throttle(), 11.772, 1e-12);
    EXPECT_NEAR(p.thrust_coeff * p.hover_throttle(), 2.943, 1e-12);
}

TEST(Dynamics, FreeFallStepBeforeGroundClamp) {
    QuadParams p;
    const QuadState s = step_rigid_body(QuadState{}, uniform_cmds(0.0), p, 0.1);
    EXPECT_NEAR(s.velocity.z(), -0.981, 1e-12);
    EXPECT_NEAR(s.position.z(), -0.0981, 1e-12);
}

TEST(Dynamics, GroundContactClampsAndZeroesDescent) {
    QuadParams p;
    const QuadState s = step_dynamics(QuadState{}, uniform_cmds(0.0), p, 0.01);
    EXPECT_EQ(s.position.z(), 0.0);
    EXPECT_EQ(s.velocity.z(), 0.0);
}

TEST(Dynamics, RejectsBadTimeStep) {
    QuadParams p;
    EXPECT_THROW(step_dynamics(QuadState{}, uniform_cmds(0.5), p, 0.0), InvalidArgument);
    EXPECT_THROW(step_dynamics(QuadState{}, uniform_cmds(0.5), p, -1e-3), InvalidArgument);
    EXPECT_THROW(step_dynamics(QuadState{}, uniform_cmds(0.5), p, 0.02), InvalidArgument);
}

TEST(Dynamics, RejectsNonFiniteState) {
    QuadParams p;
    QuadState s = airborne(1.0);
    s.velocity.x() = std::nan("");
    EXPECT_THROW(step_dynamics(s, uniform_cmds(0.5), p, 0.001), InvalidArgument);
}

TEST(Dynamics, GimbalGuardDiverges) {
    QuadParams p;
    QuadState s = airborne(10.0);
    s.attitude.pitch = deg_to_rad(79.99);
    s.angular_rates.y() = 100.0;
    EXPECT_THROW(step_dynamics(s, uniform_cmds(0.5), p, 0.001), SimulationDiverged);
}

TEST(Dynamics, FreeFallConservesEnergy) {
    QuadParams p;
    p.drag_coeff = 0.0;
    QuadState s = airborne(1000.0);
    s.velocity = Vec3(1.0, -0.5, 2.0);
    auto energy = [&](const QuadState& q) {
        return 0.5 * p.mass * q.velocity.squaredNorm() + p.mass * p.gravity * q.position.z();
    };
    for (int i = 0; i < 2000; ++i) {
        const double e0 = energy(s);
        s = step_dynamics(s, uniform_cmds(0.0), p, 0.001);
        ASSERT_LE(std::abs(energy(s) - e0) / std::abs(e0), 1e-6) << "step " << i;
    }
}

TEST(Dynamics, SymmetricCommandsKeepRatesZero) {
    QuadParams p;
    QuadState s;
    for (int i = 0; i < 3000; ++i) {
        s = step_dynamics(s, uniform_cmds(0.6), p, 0.001);
        ASSERT_EQ(s.angular_rates, Vec3::Zero());
        ASSERT_EQ(s.attitude.roll, 0.0);
        ASSERT_EQ(s.attitude.pitch, 0.0);
    }
    EXPECT_GT(s.position.z(), 0.0);
}

TEST(Dynamics, StepIsPure) {
    QuadParams p;
    QuadState s = airborne(2.0);
    s.velocity = Vec3(0.3, 0.1, -0.2);
    s.attitude = {0.05, -0.03, 1.0};
    s.angular_rates = Vec3(0.1, -0.2, 0.05);
    const MotorCommands c{{0.5, 0.45, 0.55, 0.48}};
    const QuadState a = step_dynamics(s, c, p, 0.001);
    const QuadState b = step_dynamics(s, c, p, 0.001);
    EXPECT_EQ(a.position, b.position);
    EXPECT_EQ(a.velocity, b.velocity);
    EXPECT_EQ(a.angular_rates, b.angular_rates);
    EXPECT_EQ(a.attitude.yaw, b.attitude.yaw);
}

TEST(Dynamics, TorqueSigns) {
    QuadParams p;
    // Left side harder: positive roll torque (left side up).
    EXPECT_GT(motor_torques(MotorCommands{{0.6, 0.4, 0.6, 0.4}}, p).x(), 0.0);
    // Rear harder: nose goes down, which is positive pitch.
    EXPECT_GT(motor_torques(MotorCommands{{0.4, 0.4, 0.6, 0.6}}, p).y(), 0.0);
    EXPECT_GT(motor_torques(MotorCommands{{0.4, 0.6, 0.6, 0.4}}, p).z(), 0.0);
}

TEST(Mixer, Examples) {
    const MotorCommands level = motor_mixer(0.5, 0.0, 0.0, 0.0);
    for (double u : level.u) EXPECT_DOUBLE_EQ(u, 0.5);

    const MotorCommands roll = motor_mixer(0.5, 0.1, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(roll.u[kFrontLeft], 0.6);
    EXPECT_DOUBLE_EQ(roll.u[kFrontRight], 0.4);
    EXPECT_DOUBLE_EQ(roll.u[kRearLeft], 0.6);
    EXPECT_DOUBLE_EQ(roll.u[kRearRight], 0.4);

    const MotorCommands clamped = motor_mixer(0.0, -0.3, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(clamped.u[kFrontLeft], 0.0);
    EXPECT_DOUBLE_EQ(clamped.u[kFrontRight], 0.3);
    EXPECT_DOUBLE_EQ(clamped.u[kRearLeft], 0.0);
    EXPECT_DOUBLE_EQ(clamped.u[kRearRight], 0.3);
}

TEST(Mixer, OutputsAlwaysInUnitRange) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 10000; ++i) {
        const MotorCommands m = motor_mixer(d(gen), d(gen), d(gen), d(gen));
        for (double u : m.u) {
            ASSERT_GE(u, 0.0);
            ASSERT_LE(u, 1.0);
        }
    }
}

TEST(Mixer, PositiveRollInputRollsPositive) {
    QuadParams p;
    QuadState s = airborne(10.0);
    for (int i = 0; i < 50; ++i) {
        s = step_dynamics(s, motor_mixer(p.hover_throttle(), 0.02, 0.0, 0.0), p, 0.001);
    }
    EXPECT_GT(s.angular_rates.x(), 0.0);
    EXPECT_GT(s.attitude.roll, 0.0);
}
