#include "sarquad/flight_stack.hpp"

#include <string>

namespace sarquad {

namespace {

std::int64_t divider(double physics_dt, double rate, const char* name) {
    if (!(rate > 0.0)) {
        throw InvalidArgument(std::string(name) + " must be > 0");
    }
    const double ratio = 1.0 / (rate * physics_dt);
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * ratio) {
        throw InvalidArgument(std::string(name) + " must divide the physics rate");
    }
    return static_cast<std::int64_t>(rounded);
}

}  // namespace

void FlightConfig::validate() const {
    quad.validate();
    gyro.validate();
    accel.validate();
    ultrasonic.validate();
    FilterParams f = filter;
    f.dt = 1.0 / imu_rate;
    f.validate();
    for (const PidChannel* ch : {&controllers.roll, &controllers.pitch, &controllers.yaw, &controllers.altitude}) {
        ch->gains.validate();
    }
    if (!(physics_dt > 0.0 && physics_dt <= kMaxPhysicsDt)) {
        throw InvalidArgument("physics_dt must be in (0, 0.01]");
    }
    divider(physics_dt, imu_rate, "imu_rate");
    divider(physics_dt, control_rate, "control_rate");
    divider(physics_dt, ultrasonic_rate, "ultrasonic_rate");
}

FlightConfig without_noise(FlightConfig config) {
    config.gyro = GyroModel{};
    config.accel = AccelModel{};
    config.ultrasonic.echo_noise_std = 0.0;
    config.ultrasonic.dropout_probability = 0.0;
    return config;
}

FlightStack::FlightStack(const FlightConfig& config, const QuadState& initial)
    : config_(config),
      state_(initial),
      bank_(config.controllers),
      imu_(config.gyro, config.accel, config.imu_rate, config.quad.gravity, config.seed),
      echo_rng_(config.seed, StreamId::Ultrasonic) {
    config_.validate();
    config_.filter.dt = 1.0 / config_.imu_rate;
    imu_div_ = divider(config_.physics_dt, config_.imu_rate, "imu_rate");
    control_div_ = divider(config_.physics_dt, config_.control_rate, "control_rate");
    echo_div_ = divider(config_.physics_dt, config_.ultrasonic_rate, "ultrasonic_rate");

    estimate_.roll = initial.attitude.roll;
    estimate_.pitch = initial.attitude.pitch;
    estimate_.yaw = initial.attitude.yaw;
    estimate_.altitude = initial.position.z();
    estimate_.time = initial.time;
}

bool FlightStack::step(const Setpoints& setpoints) {
    const double t = time();

    if (tick_ % imu_div_ == 0) {
        ImuSample sample = imu_.sample(state_, last_accel_, motors_.mean());
        sample.time = t;
        if (config_.accel_compensation) {
            const EulerAngles believed{estimate_.roll, estimate_.pitch, estimate_.yaw};
            sample.accel += body_to_world(believed).transpose() * last_accel_;
        }
        estimate_ = complementary_update(estimate_, sample, config_.filter);
    }
    if (tick_ % echo_div_ == 0) {
        const EchoSample echo =
            sample_ultrasonic(state_.position.z(), config_.ultrasonic, echo_rng_, pings_++, t);
        estimate_.altitude = altitude_update(estimate_.altitude, echo, config_.ultrasonic, config_.filter);
        altitude_pending_ = true;
    }

    bool controlled = false;
    if (tick_ % control_div_ == 0) {
        ControlTiming timing{1.0 / config_.control_rate, std::nullopt};
        if (altitude_pending_) {
            timing.altitude_dt = 1.0 / config_.ultrasonic_rate;
            altitude_pending_ = false;
        }
        const ControlOutput out = control_step(estimate_, setpoints, bank_, hover_throttle(), timing);
        bank_ = out.bank;
        motors_ = out.motors;
        controlled = true;
    }

    const Vec3 v0 = state_.velocity;
    try {
        const PlantStep next = step_plant(state_, motors_, config_.quad, config_.physics_dt);
        state_ = next.state;
        if (next.impact_speed && *next.impact_speed > kCrashSpeed) {
            crashed_ = true;
        }
    } catch (const SimulationDiverged& e) {
        throw SimulationDiverged(std::string(e.what()) + " at tick " + std::to_string(tick_), tick_);
    }
    state_.time = static_cast<double>(tick_ + 1) * config_.physics_dt;
    last_accel_ = (state_.velocity - v0) / config_.physics_dt;
    ++tick_;
    return controlled;
}

}  // namespace sarquad
