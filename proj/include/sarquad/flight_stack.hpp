#pragma once

// Closed-loop vehicle: plant, sensors, complementary filter and the PID bank,
// advanced one physics tick at a time with externally supplied setpoints.

#include "sarquad/control.hpp"
#include "sarquad/dynamics.hpp"
#include "sarquad/estimation.hpp"
#include "sarquad/sensors.hpp"

#include <cstdint>
#include <optional>

namespace sarquad {

/// Sensor noise defaults are invented desk-scale magnitudes; nothing here is
/// a measured property of real hardware.
struct FlightConfig {
    QuadParams quad;
    GyroModel gyro{Vec3(0.003, -0.002, 0.001), 2e-4, 0.005};
    AccelModel accel{0.05, 1.0, 120.0, 0.002, 30.0};
    UltrasonicModel ultrasonic{343.0, 2e-5, 4.0, 0.01};
    FilterParams filter;  ///< dt is overwritten with 1 / imu_rate
    ControllerBank controllers;
    double physics_dt = 0.001;
    double imu_rate = 250.0;
    double control_rate = 250.0;
    double ultrasonic_rate = 20.0;
    std::uint64_t seed = 1;
    /// Remove the navigation solution's kinematic acceleration from each
    /// accel sample before it reaches the filter. Without it, the accel tilt
    /// of a drag-limited quad is biased by roughly a/g while it manoeuvres.
    bool accel_compensation = true;

    /// Throws InvalidArgument. Sensor and control rates must divide the
    /// physics rate.
    void validate() const;
};

/// Copy of `config` with every noise source switched off.
FlightConfig without_noise(FlightConfig config);

class FlightStack {
public:
    explicit FlightStack(const FlightConfig& config, const QuadState& initial = {});

    /// Advances one physics tick. Returns true when the control loop ran on
    /// this tick. Throws SimulationDiverged carrying the tick index.
    bool step(const Setpoints& setpoints);

    const QuadState& state() const { return state_; }
    const AttitudeEstimate& estimate() const { return estimate_; }
    const MotorCommands& motors() const { return motors_; }
    const ControllerBank& controllers() const { return bank_; }
    const FlightConfig& config() const { return config_; }
    std::int64_t tick() const { return tick_; }
    double time() const { return static_cast<double>(tick_) * config_.physics_dt; }
    bool crashed() const { return crashed_; }
    double hover_throttle() const { return config_.quad.hover_throttle(); }

private:
    FlightConfig config_;
    QuadState state_;
    AttitudeEstimate estimate_;
    MotorCommands motors_;
    ControllerBank bank_;
    ImuSensor imu_;
    CounterRng echo_rng_;
    Vec3 last_accel_ = Vec3::Zero();
    std::int64_t tick_ = 0;
    std::int64_t imu_div_;
    std::int64_t control_div_;
    std::int64_t echo_div_;
    std::uint64_t pings_ = 0;
    bool altitude_pending_ = false;
    bool crashed_ = false;
};

}  // namespace sarquad
