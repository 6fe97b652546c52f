#pragma once

// Downward camera geometry and SSD-style detection post-processing.
//
// Image axes: u grows to the vehicle's right, v grows toward its tail, so the
// top of the frame looks forward.

#include "sarquad/dynamics.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sarquad {

struct CameraModel {
    int width_px = 640;
    int height_px = 480;
    double frame_rate_hz = 30.0;
    double hfov = deg_to_rad(60.0);
    double vfov = deg_to_rad(48.0);

    void validate() const;

    double focal_x() const { return 0.5 * width_px / std::tan(0.5 * hfov); }
    double focal_y() const { return 0.5 * height_px / std::tan(0.5 * vfov); }
};

struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool valid() const { return x_min < x_max && y_min < y_max; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Intersection of two boxes; empty when they do not overlap.
std::optional<BBox> intersect(const BBox& a, const BBox& b);

struct Detection {
    BBox bbox;
    double confidence = 0.0;
    std::optional<int> target_id;  ///< simulation ground truth; empty for clutter
    double visibility = 0.0;       ///< of the generating sighting, 0 for clutter

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Throughput and recall model standing in for one detection method.
struct DetectorProfile {
    std::string name;
    double seconds_per_image = 1.0;
    double recall_full = 1.0;
    double recall_partial = 0.0;
    double confidence_mean = 0.8;
    double confidence_std = 0.1;
    double visibility_threshold = 0.8;  ///< sightings at or above count as full
    double false_positive_rate = 0.0;   ///< expected clutter detections per frame

    void validate() const;
};

/// Shipped presets. Per-image latencies are those reported for each method
/// (SSD 0.333 s, Haar cascade 1 s, HOG 18.879 s). Recall and
/// confidence values are invented stand-ins: they only encode that the SSD
/// model copes with partially framed people while the older two do not.
DetectorProfile ssd_profile();
DetectorProfile haar_profile();
DetectorProfile hog_profile();

/// Looks up "ssd", "haar" or "hog" (case-sensitive).
std::optional<DetectorProfile> preset_profile(std::string_view name);

struct GroundTarget {
    int id = 0;
    Vec2 position = Vec2::Zero();  ///< m, world frame
    double width = 0.6;            ///< m, along world x
    double length = 1.8;           ///< m, along world y
    bool partial = false;          ///< mission places it only partially in frame
};

struct Footprint {
    double width_m = 0.0;   ///< across the image (u direction)
    double height_m = 0.0;  ///< along the image (v direction)
};

/// Nadir ground footprint at a given height. Throws for altitude <= 0.
Footprint ground_footprint(const CameraModel& camera, double altitude);

/// A ground-truth target as it appears in one frame.
struct Sighting {
    BBox bbox;          ///< clipped to the frame
    double visibility;  ///< clipped area / unclipped area
    int target_id;
};

inline constexpr double kTiltProjectionThreshold = 0.1;  ///< rad

/// Projects a target's ground rectangle into the image. Roll and pitch below
/// 0.1 rad are ignored; larger tilts shift the view axis on the ground.
/// Returns nothing when no part of the target is in frame.
std::optional<Sighting> project_target(const QuadState& state, const CameraModel& camera,
                                       const GroundTarget& target);

/// Ground point at the center of the view, including the tilt offset.
Vec2 view_center(const QuadState& state);

struct DefaultBoxSpec {
    std::vector<int> grid_sizes{16, 12, 8, 4};
    std::vector<double> scales{0.15, 0.25, 0.4, 0.65};
    std::vector<double> aspect_ratios{1.0, 2.0, 0.5, 4.0, 0.25};
};

/// Multi-scale prior boxes: one scale per grid, every aspect ratio at every
/// cell center, clipped to the frame. Grids and scales pair up by index.
std::vector<BBox> default_boxes(const CameraModel& camera, std::span<const int> grid_sizes,
                                std::span<const double> scales,
                                std::span<const double> aspect_ratios);
std::vector<BBox> default_boxes(const CameraModel& camera, const DefaultBoxSpec& spec);

double iou(const BBox& a, const BBox& b);

/// Index of the default box with the highest IoU against `truth`, lowest
/// index on ties.
std::size_t best_matching_box(const BBox& truth, std::span<const BBox> boxes);

/// Stochastic stand-in for a detector pass over one frame. Hit/miss and
/// confidence draws are keyed by (mission_seed, frame_index, target_id), so
/// profiles with equal recalls see identical hit patterns.
std::vector<Detection> simulate_detector(std::span<const Sighting> ground_truth,
                                         const DetectorProfile& profile,
                                         std::span<const BBox> boxes,
                                         std::uint64_t frame_index, std::uint64_t mission_seed);

/// Drops detections below `floor`.
std::vector<Detection> filter_confidence(std::span<const Detection> detections, double floor);

/// Greedy non-maximum suppression. Selection order is confidence
/// descending, then original index ascending.
std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold);

/// Frames per second implied by a profile.
double throughput(const DetectorProfile& profile);

}  // namespace sarquad
