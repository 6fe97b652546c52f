#include "sarquad/sensors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sarquad;

namespace {

QuadState level_hover() {
    QuadState s;
    s.position = Vec3(0.0, 0.0, 2.0);
    return s;
}

}  // namespace

TEST(Imu, NoiseFreeLevelHover) {
    ImuSensor imu(GyroModel{}, AccelModel{}, 250.0, 9.81, 1);
    const ImuSample s = imu.sample(level_hover(), Vec3::Zero(), 0.5);
    EXPECT_EQ(s.gyro, Vec3::Zero());
    EXPECT_NEAR((s.accel - Vec3(0.0, 0.0, -9.81)).norm(), 0.0, 1e-12);
}

TEST(Imu, ConstantBias) {
    GyroModel g;
    g.bias0 = Vec3(0.01, 0.0, 0.0);
    ImuSensor imu(g, AccelModel{}, 250.0, 9.81, 1);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(imu.sample(level_hover(), Vec3::Zero(), 0.5).gyro, Vec3(0.01, 0.0, 0.0));
    }
}

TEST(Imu, VibrationOffsetAtPeak) {
    AccelModel a;
    a.vibration_amplitude_per_throttle = 2.0;
    a.vibration_freq = 120.0;
    // At 480 Hz the second sample is stamped 1/480 s: a quarter period of 120 Hz.
    ImuSensor imu(GyroModel{}, a, 480.0, 9.81, 1);
    (void)imu.sample(level_hover(), Vec3::Zero(), 0.5);
    const ImuSample s = imu.sample(level_hover(), Vec3::Zero(), 0.5);
    EXPECT_DOUBLE_EQ(s.time, 1.0 / 480.0);
    EXPECT_NEAR(s.accel.x(), 1.0, 1e-12);
    EXPECT_NEAR(s.accel.y(), 1.0, 1e-12);
    EXPECT_NEAR(s.accel.z(), -9.81 + 1.0, 1e-12);
}

TEST(Imu, AccelIsRotatedSpecificForce) {
    EulerAngles att{0.2, -0.1, 0.7};
    const Vec3 world_accel(0.5, -0.2, 0.3);
    const Vec3 r = ideal_accel_reading(att, world_accel, 9.81);
    // Oracle: rotate (g - a) from world to body with an explicit ZYX matrix.
    const double cr = std::cos(att.roll), sr = std::sin(att.roll);
    const double cp = std::cos(att.pitch), sp = std::sin(att.pitch);
    const double cy = std::cos(att.yaw), sy = std::sin(att.yaw);
    Mat3 rz, ry, rx;
    rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
    ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
    rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
    const Vec3 expected = (rz * ry * rx).transpose() * (Vec3(0, 0, -9.81) - world_accel);
    EXPECT_NEAR((r - expected).norm(), 0.0, 1e-12);
}

TEST(Imu, BiasRandomWalkVariance) {
    GyroModel g;
    g.bias_random_walk_std = 0.01;
    const double rate = 250.0;
    ImuSensor imu(g, AccelModel{}, rate, 9.81, 2024);
    const int n = 100000;
    Vec3 prev = imu.gyro_bias();
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        (void)imu.sample(level_hover(), Vec3::Zero(), 0.5);
        const double d = imu.gyro_bias().x() - prev.x();
        prev = imu.gyro_bias();
        sum += d;
        sq += d * d;
    }
    const double var = sq / n - (sum / n) * (sum / n);
    const double expected = g.bias_random_walk_std * g.bias_random_walk_std / rate;
    EXPECT_NEAR(var / expected, 1.0, 0.10);
}

TEST(Imu, SpikeFrequencyWithinBinomialBounds) {
    AccelModel a;
    a.spike_probability = 0.01;
    a.spike_scale = 5.0 * 9.81;
    ImuSensor imu(GyroModel{}, a, 250.0, 9.81, 99);
    const int n = 100000;
    int spikes = 0;
    for (int i = 0; i < n; ++i) {
        const ImuSample s = imu.sample(level_hover(), Vec3::Zero(), 0.5);
        if (imu.last_was_spike()) {
            ++spikes;
            EXPECT_NEAR((s.accel - Vec3(0, 0, -9.81)).norm(), a.spike_scale, 1e-9);
        }
    }
    const double p = a.spike_probability;
    const double sigma = std::sqrt(n * p * (1.0 - p));
    EXPECT_NEAR(spikes, n * p, 3.0 * sigma);
}

TEST(Imu, SameSeedSameStream) {
    GyroModel g{Vec3(0.003, 0.0, 0.0), 1e-3, 0.01};
    AccelModel a{0.05, 1.0, 120.0, 0.01, 20.0};
    ImuSensor x(g, a, 250.0, 9.81, 5), y(g, a, 250.0, 9.81, 5), z(g, a, 250.0, 9.81, 6);
    bool any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const ImuSample sx = x.sample(level_hover(), Vec3::Zero(), 0.5);
        const ImuSample sy = y.sample(level_hover(), Vec3::Zero(), 0.5);
        const ImuSample sz = z.sample(level_hover(), Vec3::Zero(), 0.5);
        ASSERT_EQ(sx.gyro, sy.gyro);
        ASSERT_EQ(sx.accel, sy.accel);
        any_diff = any_diff || sx.gyro != sz.gyro;
    }
    EXPECT_TRUE(any_diff);
}

TEST(Ultrasonic, ClosedFormEcho) {
    UltrasonicModel m;
    CounterRng rng(1, StreamId::Ultrasonic);
    const EchoSample e = sample_ultrasonic(1.0, m, rng, 0, 0.0);
    ASSERT_TRUE(e.echo_time);
    EXPECT_NEAR(*e.echo_time, 2.0 / 343.0, 1e-15);
    EXPECT_NEAR(*e.echo_time, 5.831e-3, 1e-6);
}

TEST(Ultrasonic, GroundLevelEchoIsZero) {
    UltrasonicModel m;
    CounterRng rng(1, StreamId::Ultrasonic);
    const EchoSample e = sample_ultrasonic(0.0, m, rng, 0, 0.0);
    ASSERT_TRUE(e.echo_time);
    EXPECT_EQ(*e.echo_time, 0.0);
}

TEST(Ultrasonic, OutOfRangeDropsOut) {
    UltrasonicModel m;
    m.max_range = 4.0;
    CounterRng rng(1, StreamId::Ultrasonic);
    EXPECT_TRUE(sample_ultrasonic(5.0, m, rng, 0, 0.0).dropout());
}

TEST(Ultrasonic, NoisyEchoNeverNegative) {
    UltrasonicModel m;
    m.echo_noise_std = 1e-3;
    CounterRng rng(8, StreamId::Ultrasonic);
    for (std::uint64_t i = 0; i < 5000; ++i) {
        const EchoSample e = sample_ultrasonic(0.01, m, rng, i, 0.0);
        ASSERT_TRUE(e.echo_time);
        ASSERT_GE(*e.echo_time, 0.0);
    }
}

TEST(Ultrasonic, DropoutRate) {
    UltrasonicModel m;
    m.dropout_probability = 0.2;
    CounterRng rng(8, StreamId::Ultrasonic);
    int drops = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) drops += sample_ultrasonic(1.0, m, rng, i, 0.0).dropout();
    EXPECT_NEAR(drops, 0.2 * n, 3.0 * std::sqrt(n * 0.2 * 0.8));
}

TEST(SensorModels, Validation) {
    UltrasonicModel u;
    u.sound_speed = 0.0;
    EXPECT_THROW(u.validate(), InvalidArgument);
    AccelModel a;
    a.spike_probability = 1.5;
    EXPECT_THROW(a.validate(), InvalidArgument);
    GyroModel g;
    g.white_noise_std = -1.0;
    EXPECT_THROW(g.validate(), InvalidArgument);
}
