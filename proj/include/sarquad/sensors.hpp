#pragma once

// Noisy IMU and ultrasonic range sensors driven by the true vehicle state.
//
// The accelerometer follows the convention that it reads (0, 0, -g) when the
// vehicle sits level at rest, i.e. it reports the gravity direction in the
// body frame minus any kinematic acceleration.

#include "sarquad/common.hpp"
#include "sarquad/dynamics.hpp"
#include "sarquad/random.hpp"

#include <optional>

namespace sarquad {

struct ImuSample {
    Vec3 gyro = Vec3::Zero();   ///< rad/s, body frame
    Vec3 accel = Vec3::Zero();  ///< m/s^2, body frame
    double time = 0.0;
};

struct GyroModel {
    Vec3 bias0 = Vec3::Zero();          ///< rad/s
    double bias_random_walk_std = 0.0;  ///< rad/s per sqrt(s)
    double white_noise_std = 0.0;       ///< rad/s

    void validate() const;
};

struct AccelModel {
    double white_noise_std = 0.0;                   ///< m/s^2
    double vibration_amplitude_per_throttle = 0.0;  ///< m/s^2 per unit mean throttle
    double vibration_freq = 120.0;                  ///< Hz
    double spike_probability = 0.0;                 ///< per sample
    double spike_scale = 0.0;                       ///< m/s^2, spike magnitude

    void validate() const;
};

struct UltrasonicModel {
    double sound_speed = 343.0;        ///< m/s at 20 C
    double echo_noise_std = 0.0;       ///< s
    double max_range = 4.0;            ///< m
    double dropout_probability = 0.0;  ///< per ping

    void validate() const;
};

struct EchoSample {
    std::optional<double> echo_time;  ///< round trip, s; empty on dropout
    double time = 0.0;

    bool dropout() const { return !echo_time.has_value(); }
};

/// Noise-free accelerometer reading for a given attitude and world-frame
/// kinematic acceleration.
Vec3 ideal_accel_reading(const EulerAngles& attitude, const Vec3& world_accel, double gravity);

/// IMU with a random-walk gyro bias and a vibration/spike contaminated
/// accelerometer. Samples are produced at a fixed rate; sample k is stamped
/// k / rate_hz and draws only from keys indexed by k.
class ImuSensor {
public:
    ImuSensor(const GyroModel& gyro, const AccelModel& accel, double rate_hz,
              double gravity, std::uint64_t seed);

    /// Produces the next sample. `world_accel` is the true kinematic
    /// acceleration; `mean_throttle` scales motor vibration.
    ImuSample sample(const QuadState& truth, const Vec3& world_accel, double mean_throttle);

    const Vec3& gyro_bias() const { return bias_; }
    std::uint64_t samples_taken() const { return index_; }
    /// Whether the most recent sample carried an injected spike.
    bool last_was_spike() const { return last_spike_; }

private:
    GyroModel gyro_;
    AccelModel accel_;
    double dt_;
    double gravity_;
    CounterRng gyro_noise_;
    CounterRng bias_walk_;
    CounterRng accel_noise_;
    CounterRng spikes_;
    Vec3 bias_;
    std::uint64_t index_ = 0;
    bool last_spike_ = false;
};

/// One ultrasonic ping. Draws are keyed by `ping_index` on `rng`.
EchoSample sample_ultrasonic(double true_altitude, const UltrasonicModel& model,
                             const CounterRng& rng, std::uint64_t ping_index, double time);

}  // namespace sarquad
