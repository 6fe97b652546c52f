#pragma once

#include "sarquad/sensors.hpp"

namespace sarquad {

struct AttitudeEstimate {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
    double altitude = 0.0;  ///< m
    double time = 0.0;
};

struct FilterParams {
    double alpha = 0.98;  ///< weight on the gyro-propagated angle
    double accel_mag_min = 0.5 * 9.81;
    double accel_mag_max = 1.5 * 9.81;
    double altitude_lpf_coeff = 0.5;
    double dt = 1.0 / 250.0;

    /// The accel window may be opened to [0, inf) to disable gating.
    void validate() const;
};

struct TiltAngles {
    double roll = 0.0;
    double pitch = 0.0;
};

/// Roll and pitch implied by an accelerometer reading that points along
/// gravity. Throws InvalidArgument for a zero vector.
TiltAngles accel_to_angles(const Vec3& accel);

/// True when the accel magnitude lies inside the plausibility window.
bool accel_plausible(const Vec3& accel, const FilterParams& params);

/// One complementary-filter step. Roll and pitch blend the gyro prediction
/// with the accel tilt; an implausible accel sample falls back to the gyro
/// prediction alone. Yaw is gyro-only. Altitude is carried through.
AttitudeEstimate complementary_update(const AttitudeEstimate& prev, const ImuSample& imu,
                                      const FilterParams& params);

/// Low-passed altitude from one echo; holds the previous value on dropout.
double altitude_update(double prev_altitude, const EchoSample& echo,
                       const UltrasonicModel& model, const FilterParams& params);

}  // namespace sarquad
