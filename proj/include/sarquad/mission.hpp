#pragma once

// End-to-end search runs: lawnmower coverage at a fixed height, camera frames
// handed to a latency-bound detector, and mission-level metrics.

#include "sarquad/flight_stack.hpp"
#include "sarquad/perception.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sarquad {

struct World {
    double width = 40.0;   ///< m along x
    double height = 30.0;  ///< m along y
};

/// Waypoint follower tuning. The follower reads the navigation solution
/// (true position, velocity and heading; the airframe carries no GNSS) and
/// turns velocity errors into tilt setpoints.
struct GuidanceParams {
    double max_tilt = 0.3;           ///< rad
    double position_gain = 0.8;      ///< 1/s
    double velocity_gain = 1.5;      ///< 1/s
    double max_accel = 1.5;          ///< m/s^2
    double acceptance_radius = 0.4;  ///< m
    double takeoff_tolerance = 0.3;  ///< m below search altitude
};

struct MissionConfig {
    World world;
    Vec2 spawn = Vec2::Zero();
    double search_altitude = 3.0;
    double cruise_speed = 2.0;  ///< capped by flight.quad.max_speed
    double endurance = 720.0;   ///< s, battery budget
    std::vector<GroundTarget> targets;
    DetectorProfile detector = ssd_profile();
    double swath_overlap = 0.2;
    std::uint64_t seed = 1;

    FlightConfig flight;  ///< plant, sensors, filter, gains, rates
    CameraModel camera;
    DefaultBoxSpec boxes;
    double nms_iou_threshold = 0.45;
    double confidence_floor = 0.5;
    double match_iou = 0.5;  ///< detection-to-truth IoU needed to count a find
    GuidanceParams guidance;
    bool record_telemetry = true;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

struct LawnmowerPlan {
    double swath = 0.0;    ///< footprint width at search height
    double spacing = 0.0;  ///< swath * (1 - overlap)
    std::vector<double> rows;  ///< y of each row, ascending
    std::vector<Vec2> waypoints;
};

/// Boustrophedon rows along x, spaced swath*(1-overlap) apart and centered
/// on the world in y. A world narrower than one swath gets a single row.
LawnmowerPlan plan_lawnmower(const World& world, const CameraModel& camera, double altitude,
                             double overlap);
std::vector<Vec2> generate_lawnmower(const World& world, const CameraModel& camera,
                                     double altitude, double overlap);

/// Targets as flown: those flagged partial are moved across-track onto the
/// nearest swath edge that no other row covers, so the camera only ever
/// frames part of them.
std::vector<GroundTarget> place_targets(std::span<const GroundTarget> targets,
                                        const LawnmowerPlan& plan, const World& world);

struct ScheduledFrame {
    std::uint64_t frame_index = 0;
    double capture_time = 0.0;
    double start_time = 0.0;
    double done_time = 0.0;
};

/// Frames the detector gets through in `duration`. The camera runs at
/// `camera_rate`; the detector is busy seconds_per_image per frame and, when
/// it frees up, takes the newest frame (older ones are dropped) or waits for
/// the next capture. Frames finishing after `duration` are not listed.
std::vector<ScheduledFrame> frame_schedule(double camera_rate, const DetectorProfile& profile,
                                           double duration);

struct MissionMetrics {
    int targets_total = 0;
    int targets_detected = 0;
    std::optional<double> time_to_first_detection;
    int detections_emitted = 0;
    int frames_captured = 0;
    int frames_processed = 0;
    double coverage_fraction = 0.0;
    double flight_time = 0.0;
    bool crashed = false;
    bool path_completed = false;
    double mean_confidence = 0.0;  ///< over emitted detections, 0 if none
    double max_sighting_visibility = 0.0;
    double rms_roll_error = 0.0;   ///< estimate vs truth, rad
    double rms_pitch_error = 0.0;
    double rms_altitude_error = 0.0;  ///< m
    std::vector<std::optional<double>> target_detection_times;  ///< per target, config order
};

struct TelemetryRow {
    double time = 0.0;
    Vec3 position = Vec3::Zero();
    EulerAngles attitude;
    AttitudeEstimate estimate;
    MotorCommands motors;
};

struct DetectionEvent {
    std::uint64_t frame_index = 0;
    double sim_time = 0.0;  ///< when the detector finished the frame
    Detection detection;
};

struct MissionResult {
    MissionMetrics metrics;
    std::vector<TelemetryRow> telemetry;  ///< one row per control tick
    std::vector<DetectionEvent> detections;
    std::vector<GroundTarget> targets;    ///< as placed
    std::string profile_name;
};

/// Runs one mission. Throws ConfigError for an invalid config and
/// SimulationDiverged (with the tick index) if the vehicle leaves the model's
/// envelope.
MissionResult run_mission(const MissionConfig& config);

/// The same mission once per profile, same seed, run concurrently.
std::vector<MissionResult> compare_profiles(const MissionConfig& config,
                                            std::span<const DetectorProfile> profiles);

}  // namespace sarquad
