#include "sarquad/estimation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sarquad;

namespace {

ImuSample imu_at(double t, Vec3 gyro, Vec3 accel) { return ImuSample{gyro, accel, t}; }

const Vec3 kLevel(0.0, 0.0, -9.81);

}  // namespace

TEST(AccelToAngles, Examples) {
    const TiltAngles level = accel_to_angles(kLevel);
    EXPECT_NEAR(level.roll, 0.0, 1e-15);
    EXPECT_NEAR(level.pitch, 0.0, 1e-15);

    const double h = 9.81 / std::sqrt(2.0);
    const TiltAngles nose_down = accel_to_angles(Vec3(h, 0.0, -h));
    EXPECT_NEAR(nose_down.roll, 0.0, 1e-12);
    EXPECT_NEAR(nose_down.pitch, kPi / 4.0, 1e-12);

    const TiltAngles left = accel_to_angles(Vec3(0.0, h, -h));
    EXPECT_NEAR(left.roll, -kPi / 4.0, 1e-12);
    EXPECT_NEAR(left.pitch, 0.0, 1e-12);
}

TEST(AccelToAngles, ZeroVectorThrows) { EXPECT_THROW(accel_to_angles(Vec3::Zero()), InvalidArgument); }

TEST(AccelToAngles, InvertsTheMeasurementModel) {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> d(-1.2, 1.2);
    for (int i = 0; i < 1000; ++i) {
        const double roll = d(gen), pitch = d(gen);
        // Specific force at rest in the body frame, written out by hand.
        const Vec3 a(9.81 * std::sin(pitch), -9.81 * std::sin(roll) * std::cos(pitch),
                     -9.81 * std::cos(roll) * std::cos(pitch));
        const TiltAngles t = accel_to_angles(a);
        ASSERT_NEAR(t.roll, roll, 1e-12);
        ASSERT_NEAR(t.pitch, pitch, 1e-12);
    }
}

TEST(Complementary, AlphaOneIsPureGyro) {
    FilterParams p;
    p.alpha = 1.0;
    p.dt = 0.01;
    AttitudeEstimate e;
    const Vec3 rates(0.1, -0.2, 0.05);
    for (int i = 1; i <= 100; ++i) {
        e = complementary_update(e, imu_at(i * 0.01, rates, Vec3(3.0, -2.0, -9.0)), p);
    }
    EXPECT_NEAR(e.roll, 0.1, 1e-12);
    EXPECT_NEAR(e.pitch, -0.2, 1e-12);
    EXPECT_NEAR(e.yaw, 0.05, 1e-12);
}

TEST(Complementary, LevelFixedPoint) {
    FilterParams p;
    const AttitudeEstimate e = complementary_update(AttitudeEstimate{}, imu_at(p.dt, Vec3::Zero(), kLevel), p);
    EXPECT_EQ(e.roll, 0.0);
    EXPECT_EQ(e.pitch, 0.0);
}

TEST(Complementary, AlphaZeroFollowsAccel) {
    FilterParams p;
    p.alpha = 0.0;
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    AttitudeEstimate e{0.3, -0.2, 0.0, 0.0, 0.0};
    for (int i = 1; i <= 200; ++i) {
        const Vec3 a(d(gen), d(gen), -9.81 + d(gen));
        e = complementary_update(e, imu_at(i * p.dt, Vec3(d(gen), d(gen), 0.0), a), p);
        const TiltAngles t = accel_to_angles(a);
        ASSERT_EQ(e.roll, wrap_angle(t.roll));
        ASSERT_EQ(e.pitch, wrap_angle(t.pitch));
    }
}

TEST(Complementary, GatedSampleEqualsGyroPrediction) {
    FilterParams p;
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (int i = 0; i < 500; ++i) {
        const AttitudeEstimate prev{d(gen), d(gen), d(gen), 1.0, 0.0};
        const Vec3 rates(d(gen), d(gen), d(gen));
        const double scale = (i % 2 == 0) ? 0.3 : 2.0;  // below and above the window
        const ImuSample s = imu_at(p.dt, rates, scale * kLevel);
        ASSERT_FALSE(accel_plausible(s.accel, p));
        const AttitudeEstimate e = complementary_update(prev, s, p);
        ASSERT_EQ(e.roll, wrap_angle(prev.roll + rates.x() * p.dt));
        ASSERT_EQ(e.pitch, wrap_angle(prev.pitch + rates.y() * p.dt));
        ASSERT_EQ(e.yaw, wrap_angle(prev.yaw + rates.z() * p.dt));
    }
}

TEST(Complementary, BiasFixedPoint) {
    FilterParams p;
    p.alpha = 0.98;
    p.dt = 0.01;
    const double b = 0.01;
    AttitudeEstimate e;
    for (int i = 1; i <= 6000; ++i) {
        e = complementary_update(e, imu_at(i * p.dt, Vec3(b, 0.0, 0.0), kLevel), p);
    }
    const double fixed_point = p.alpha * b * p.dt / (1.0 - p.alpha);
    EXPECT_NEAR(fixed_point, 4.9e-3, 1e-12);
    EXPECT_NEAR(e.roll, fixed_point, 1e-9);
}

TEST(Complementary, OutputsWrapped) {
    FilterParams p;
    p.alpha = 1.0;
    AttitudeEstimate e{0.0, 0.0, kPi - 0.001, 0.0, 0.0};
    e = complementary_update(e, imu_at(p.dt, Vec3(0, 0, 1.0), kLevel), p);
    EXPECT_GT(e.yaw, -kPi);
    EXPECT_LT(e.yaw, -kPi + 0.01);
}

TEST(Altitude, Examples) {
    UltrasonicModel m;
    FilterParams p;
    p.altitude_lpf_coeff = 1.0;
    EXPECT_NEAR(altitude_update(0.0, EchoSample{5.831e-3, 0.0}, m, p), 1.0, 1e-4);
    EXPECT_EQ(altitude_update(2.0, EchoSample{std::nullopt, 0.0}, m, p), 2.0);
    p.altitude_lpf_coeff = 0.5;
    EXPECT_DOUBLE_EQ(altitude_update(0.0, EchoSample{2.0 / 343.0, 0.0}, m, p), 0.5);
}

TEST(Altitude, EchoRoundTrip) {
    UltrasonicModel m;
    FilterParams p;
    p.altitude_lpf_coeff = 1.0;
    CounterRng rng(1, StreamId::Ultrasonic);
    for (double h = 0.0; h <= 4.0; h += 0.137) {
        EXPECT_NEAR(altitude_update(0.0, sample_ultrasonic(h, m, rng, 0, 0.0), m, p), h, 1e-12);
    }
}

TEST(FilterParams, Validation) {
    FilterParams p;
    p.alpha = 1.1;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = FilterParams{};
    p.accel_mag_min = 20.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = FilterParams{};
    p.accel_mag_min = 0.0;
    p.accel_mag_max = std::numeric_limits<double>::infinity();
    EXPECT_NO_THROW(p.validate());
}
