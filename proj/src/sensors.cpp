#include "sarquad/sensors.hpp"

#include <algorithm>

namespace sarquad {

namespace {
void require_nonneg(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(name) + " must be >= 0");
    }
}
}  // namespace

void GyroModel::validate() const {
    if (!bias0.allFinite()) {
        throw InvalidArgument("gyro.bias0 must be finite");
    }
    require_nonneg(bias_random_walk_std, "gyro.bias_random_walk_std");
    require_nonneg(white_noise_std, "gyro.white_noise_std");
}

void AccelModel::validate() const {
    require_nonneg(white_noise_std, "accel.white_noise_std");
    require_nonneg(vibration_amplitude_per_throttle, "accel.vibration_amplitude_per_throttle");
    require_nonneg(vibration_freq, "accel.vibration_freq");
    require_nonneg(spike_probability, "accel.spike_probability");
    require_nonneg(spike_scale, "accel.spike_scale");
    if (spike_probability > 1.0) {
        throw InvalidArgument("accel.spike_probability must be <= 1");
    }
}

void UltrasonicModel::validate() const {
    if (!(sound_speed > 0.0)) {
        throw InvalidArgument("ultrasonic.sound_speed must be > 0");
    }
    if (!(max_range > 0.0)) {
        throw InvalidArgument("ultrasonic.max_range must be > 0");
    }
    require_nonneg(echo_noise_std, "ultrasonic.echo_noise_std");
    require_nonneg(dropout_probability, "ultrasonic.dropout_probability");
    if (dropout_probability > 1.0) {
        throw InvalidArgument("ultrasonic.dropout_probability must be <= 1");
    }
}

Vec3 ideal_accel_reading(const EulerAngles& attitude, const Vec3& world_accel, double gravity) {
    const Vec3 gravity_world(0.0, 0.0, -gravity);
    return body_to_world(attitude).transpose() * (gravity_world - world_accel);
}

ImuSensor::ImuSensor(const GyroModel& gyro, const AccelModel& accel, double rate_hz,
                     double gravity, std::uint64_t seed)
    : gyro_(gyro),
      accel_(accel),
      dt_(1.0 / rate_hz),
      gravity_(gravity),
      gyro_noise_(seed, StreamId::GyroNoise),
      bias_walk_(seed, StreamId::GyroBias),
      accel_noise_(seed, StreamId::AccelNoise),
      spikes_(seed, StreamId::AccelSpike),
      bias_(gyro.bias0) {
    if (!(rate_hz > 0.0)) {
        throw InvalidArgument("imu rate must be > 0");
    }
    gyro_.validate();
    accel_.validate();
}

ImuSample ImuSensor::sample(const QuadState& truth, const Vec3& world_accel, double mean_throttle) {
    const std::uint64_t k = index_++;
    ImuSample out;
    out.time = static_cast<double>(k) * dt_;

    Vec3 white;
    for (int axis = 0; axis < 3; ++axis) {
        white[axis] = gyro_noise_.gaussian(k, axis);
    }
    out.gyro = truth.angular_rates + bias_ + gyro_.white_noise_std * white;

    // Bias evolves after the reading so sample 0 reports bias0 exactly.
    if (gyro_.bias_random_walk_std > 0.0) {
        const double step_std = gyro_.bias_random_walk_std * std::sqrt(dt_);
        for (int axis = 0; axis < 3; ++axis) {
            bias_[axis] += step_std * bias_walk_.gaussian(k, axis);
        }
    }

    Vec3 accel = ideal_accel_reading(truth.attitude, world_accel, gravity_);
    for (int axis = 0; axis < 3; ++axis) {
        accel[axis] += accel_.white_noise_std * accel_noise_.gaussian(k, axis);
    }
    const double vibration = accel_.vibration_amplitude_per_throttle *
                             std::clamp(mean_throttle, 0.0, 1.0) *
                             std::sin(kTwoPi * accel_.vibration_freq * out.time);
    accel.array() += vibration;

    last_spike_ = accel_.spike_probability > 0.0 && spikes_.uniform(k, 0) < accel_.spike_probability;
    if (last_spike_) {
        Vec3 dir(spikes_.gaussian(k, 1), spikes_.gaussian(k, 2), spikes_.gaussian(k, 3));
        const double n = dir.norm();
        dir = n > 0.0 ? Vec3(dir / n) : Vec3::UnitX();
        accel += accel_.spike_scale * dir;
    }
    out.accel = accel;
    return out;
}

EchoSample sample_ultrasonic(double true_altitude, const UltrasonicModel& model,
                             const CounterRng& rng, std::uint64_t ping_index, double time) {
    EchoSample out;
    out.time = time;
    if (true_altitude > model.max_range) {
        return out;
    }
    if (model.dropout_probability > 0.0 && rng.uniform(ping_index, 0) < model.dropout_probability) {
        return out;
    }
    double echo = 2.0 * std::max(true_altitude, 0.0) / model.sound_speed;
    if (model.echo_noise_std > 0.0) {
        echo += model.echo_noise_std * rng.gaussian(ping_index, 1);
    }
    out.echo_time = std::max(echo, 0.0);
    return out;
}

}  // namespace sarquad
