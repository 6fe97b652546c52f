#include "sarquad/estimation.hpp"

#include <algorithm>

namespace sarquad {

namespace {
// alpha * predicted + (1 - alpha) * measured, with the measurement shifted by
// 2pi when needed so a +-pi crossing never blends the long way round.
double blend(double predicted, double measured, double alpha) {
    const double diff = measured - predicted;
    if (diff > kPi) {
        measured -= kTwoPi;
    } else if (diff < -kPi) {
        measured += kTwoPi;
    }
    return wrap_angle(alpha * predicted + (1.0 - alpha) * measured);
}
}  // namespace

void FilterParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("filter.alpha must be in [0, 1]");
    }
    if (!(accel_mag_min >= 0.0) || !(accel_mag_min < accel_mag_max)) {
        throw InvalidArgument("filter accel window must satisfy 0 <= accel_mag_min < accel_mag_max");
    }
    if (!(altitude_lpf_coeff >= 0.0 && altitude_lpf_coeff <= 1.0)) {
        throw InvalidArgument("filter.altitude_lpf_coeff must be in [0, 1]");
    }
    if (!(dt > 0.0)) {
        throw InvalidArgument("filter.dt must be > 0");
    }
}

TiltAngles accel_to_angles(const Vec3& accel) {
    if (!(accel.squaredNorm() > 0.0)) {
        throw InvalidArgument("accel_to_angles: zero-magnitude acceleration");
    }
    const double ax = accel.x(), ay = accel.y(), az = accel.z();
    return {std::atan2(-ay, -az), std::atan2(ax, std::sqrt(ay * ay + az * az))};
}

bool accel_plausible(const Vec3& accel, const FilterParams& params) {
    const double mag = accel.norm();
    return mag > 0.0 && mag >= params.accel_mag_min && mag <= params.accel_mag_max;
}

AttitudeEstimate complementary_update(const AttitudeEstimate& prev, const ImuSample& imu,
                                      const FilterParams& params) {
    AttitudeEstimate next = prev;
    next.time = imu.time;

    const double roll_pred = prev.roll + imu.gyro.x() * params.dt;
    const double pitch_pred = prev.pitch + imu.gyro.y() * params.dt;
    next.yaw = wrap_angle(prev.yaw + imu.gyro.z() * params.dt);

    if (accel_plausible(imu.accel, params)) {
        const TiltAngles tilt = accel_to_angles(imu.accel);
        next.roll = blend(roll_pred, tilt.roll, params.alpha);
        next.pitch = blend(pitch_pred, tilt.pitch, params.alpha);
    } else {
        next.roll = wrap_angle(roll_pred);
        next.pitch = wrap_angle(pitch_pred);
    }
    return next;
}

double altitude_update(double prev_altitude, const EchoSample& echo,
                       const UltrasonicModel& model, const FilterParams& params) {
    if (echo.dropout()) {
        return prev_altitude;
    }
    const double raw = model.sound_speed * *echo.echo_time / 2.0;
    const double k = params.altitude_lpf_coeff;
    return std::max(0.0, (1.0 - k) * prev_altitude + k * raw);
}

}  // namespace sarquad
