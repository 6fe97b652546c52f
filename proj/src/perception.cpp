#include "sarquad/perception.hpp"

#include "sarquad/random.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace sarquad {

void CameraModel::validate() const {
    if (width_px <= 0 || height_px <= 0) {
        throw InvalidArgument("camera pixel dimensions must be > 0");
    }
    if (!(frame_rate_hz > 0.0)) {
        throw InvalidArgument("camera.frame_rate_hz must be > 0");
    }
    if (!(hfov > 0.0 && hfov < kPi) || !(vfov > 0.0 && vfov < kPi)) {
        throw InvalidArgument("camera field of view must be in (0, pi)");
    }
}

std::optional<BBox> intersect(const BBox& a, const BBox& b) {
    BBox r{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min),
           std::min(a.x_max, b.x_max), std::min(a.y_max, b.y_max)};
    if (!r.valid()) {
        return std::nullopt;
    }
    return r;
}

void DetectorProfile::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!(seconds_per_image > 0.0) || !std::isfinite(seconds_per_image)) {
        throw InvalidArgument("detector.seconds_per_image must be > 0");
    }
    if (!unit(recall_full) || !unit(recall_partial)) {
        throw InvalidArgument("detector recalls must be in [0, 1]");
    }
    if (!(visibility_threshold > 0.0 && visibility_threshold < 1.0)) {
        throw InvalidArgument("detector.visibility_threshold must be in (0, 1)");
    }
    if (!(confidence_std >= 0.0) || !std::isfinite(confidence_mean)) {
        throw InvalidArgument("detector confidence distribution is invalid");
    }
    if (!(false_positive_rate >= 0.0)) {
        throw InvalidArgument("detector.false_positive_rate must be >= 0");
    }
}

DetectorProfile ssd_profile() {
    return {"ssd", 0.333, 0.95, 0.6, 0.85, 0.08, 0.8, 0.02};
}

DetectorProfile haar_profile() {
    return {"haar", 1.0, 0.8, 0.0, 0.75, 0.1, 0.8, 0.05};
}

DetectorProfile hog_profile() {
    return {"hog", 18.879, 0.85, 0.0, 0.75, 0.1, 0.8, 0.05};
}

std::optional<DetectorProfile> preset_profile(std::string_view name) {
    if (name == "ssd") return ssd_profile();
    if (name == "haar") return haar_profile();
    if (name == "hog") return hog_profile();
    return std::nullopt;
}

Footprint ground_footprint(const CameraModel& camera, double altitude) {
    if (!(altitude > 0.0)) {
        throw InvalidArgument("ground_footprint: altitude must be > 0");
    }
    return {2.0 * altitude * std::tan(0.5 * camera.hfov),
            2.0 * altitude * std::tan(0.5 * camera.vfov)};
}

Vec2 view_center(const QuadState& state) {
    const double h = state.position.z();
    const double roll = state.attitude.roll;
    const double pitch = state.attitude.pitch;
    // Nose-down pitch swings the downward axis backward; left-up roll swings
    // it to the left.
    const double fwd = std::abs(pitch) >= kTiltProjectionThreshold ? -h * std::tan(pitch) : 0.0;
    const double left = std::abs(roll) >= kTiltProjectionThreshold ? h * std::tan(roll) : 0.0;
    const double c = std::cos(state.attitude.yaw), s = std::sin(state.attitude.yaw);
    return {state.position.x() + c * fwd - s * left, state.position.y() + s * fwd + c * left};
}

std::optional<Sighting> project_target(const QuadState& state, const CameraModel& camera,
                                       const GroundTarget& target) {
    const double h = state.position.z();
    if (!(h > 0.0)) {
        return std::nullopt;
    }
    const Vec2 center = view_center(state);
    const double c = std::cos(state.attitude.yaw), s = std::sin(state.attitude.yaw);
    const double fx = camera.focal_x(), fy = camera.focal_y();
    const double cx = 0.5 * camera.width_px, cy = 0.5 * camera.height_px;

    BBox raw{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    const double hw = 0.5 * target.width, hl = 0.5 * target.length;
    const std::array<Vec2, 4> corners{Vec2(-hw, -hl), Vec2(hw, -hl), Vec2(hw, hl), Vec2(-hw, hl)};
    for (const Vec2& corner : corners) {
        const Vec2 d = target.position + corner - center;
        const double fwd = c * d.x() + s * d.y();
        const double left = -s * d.x() + c * d.y();
        const double u = cx - fx * left / h;
        const double v = cy - fy * fwd / h;
        raw.x_min = std::min(raw.x_min, u);
        raw.x_max = std::max(raw.x_max, u);
        raw.y_min = std::min(raw.y_min, v);
        raw.y_max = std::max(raw.y_max, v);
    }

    const BBox frame{0.0, 0.0, static_cast<double>(camera.width_px),
                     static_cast<double>(camera.height_px)};
    const auto clipped = intersect(raw, frame);
    if (!clipped) {
        return std::nullopt;
    }
    const double visibility = std::min(1.0, clipped->area() / raw.area());
    if (!(visibility > 0.0)) {
        return std::nullopt;
    }
    return Sighting{*clipped, visibility, target.id};
}

std::vector<BBox> default_boxes(const CameraModel& camera, std::span<const int> grid_sizes,
                                std::span<const double> scales,
                                std::span<const double> aspect_ratios) {
    if (grid_sizes.empty() || scales.empty() || aspect_ratios.empty()) {
        throw InvalidArgument("default_boxes: grid, scale and aspect lists must be non-empty");
    }
    if (grid_sizes.size() != scales.size()) {
        throw InvalidArgument("default_boxes: need exactly one scale per grid");
    }
    for (std::size_t k = 0; k < scales.size(); ++k) {
        if (!(scales[k] > 0.0 && scales[k] <= 1.0)) {
            throw InvalidArgument("default_boxes: scales must be in (0, 1]");
        }
        if (k > 0 && scales[k] < scales[k - 1]) {
            throw InvalidArgument("default_boxes: scales must be ascending");
        }
        if (grid_sizes[k] <= 0) {
            throw InvalidArgument("default_boxes: grid sizes must be > 0");
        }
    }
    for (double ar : aspect_ratios) {
        if (!(ar > 0.0)) {
            throw InvalidArgument("default_boxes: aspect ratios must be > 0");
        }
    }

    const double w = camera.width_px, h = camera.height_px;
    const BBox frame{0.0, 0.0, w, h};
    std::vector<BBox> boxes;
    for (std::size_t k = 0; k < grid_sizes.size(); ++k) {
        const int n = grid_sizes[k];
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < n; ++col) {
                const double ucenter = (col + 0.5) * w / n;
                const double vcenter = (row + 0.5) * h / n;
                for (double ar : aspect_ratios) {
                    const double bw = scales[k] * w * std::sqrt(ar);
                    const double bh = scales[k] * h / std::sqrt(ar);
                    const BBox b{ucenter - 0.5 * bw, vcenter - 0.5 * bh, ucenter + 0.5 * bw,
                                 vcenter + 0.5 * bh};
                    boxes.push_back(*intersect(b, frame));
                }
            }
        }
    }
    return boxes;
}

std::vector<BBox> default_boxes(const CameraModel& camera, const DefaultBoxSpec& spec) {
    return default_boxes(camera, spec.grid_sizes, spec.scales, spec.aspect_ratios);
}

double iou(const BBox& a, const BBox& b) {
    const auto inter = intersect(a, b);
    if (!inter) {
        return 0.0;
    }
    const double i = inter->area();
    const double u = a.area() + b.area() - i;
    return u > 0.0 ? std::clamp(i / u, 0.0, 1.0) : 0.0;
}

std::size_t best_matching_box(const BBox& truth, std::span<const BBox> boxes) {
    if (boxes.empty()) {
        throw InvalidArgument("best_matching_box: empty box set");
    }
    std::size_t best = 0;
    double best_iou = -1.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const double v = iou(truth, boxes[i]);
        if (v > best_iou) {
            best_iou = v;
            best = i;
        }
    }
    return best;
}

namespace {

double clamped_confidence(const DetectorProfile& p, double z) {
    return std::clamp(p.confidence_mean + p.confidence_std * z, 0.0, 1.0);
}

// Inverse-CDF Poisson draw; rates here are small so the loop is short.
int poisson(double rate, double u) {
    if (!(rate > 0.0)) {
        return 0;
    }
    int k = 0;
    double p = std::exp(-rate);
    double cdf = p;
    while (u > cdf && k < 64) {
        ++k;
        p *= rate / k;
        cdf += p;
    }
    return k;
}

std::uint64_t target_key(int target_id) {
    return static_cast<std::uint64_t>(static_cast<std::uint32_t>(target_id));
}

}  // namespace

std::vector<Detection> simulate_detector(std::span<const Sighting> ground_truth,
                                         const DetectorProfile& profile,
                                         std::span<const BBox> boxes,
                                         std::uint64_t frame_index, std::uint64_t mission_seed) {
    const CounterRng hits(mission_seed, StreamId::DetectionHit);
    const CounterRng confidence(mission_seed, StreamId::DetectionConfidence);
    const CounterRng clutter(mission_seed, StreamId::FalsePositive);

    std::vector<Detection> out;
    for (const Sighting& s : ground_truth) {
        const double recall =
            s.visibility >= profile.visibility_threshold ? profile.recall_full : profile.recall_partial;
        const std::uint64_t slot = target_key(s.target_id);
        if (!(hits.uniform(frame_index, slot) < recall)) {
            continue;
        }
        Detection d;
        d.bbox = boxes[best_matching_box(s.bbox, boxes)];
        d.confidence = clamped_confidence(profile, confidence.gaussian(frame_index, slot));
        d.target_id = s.target_id;
        d.visibility = s.visibility;
        out.push_back(d);
    }

    const int n_clutter = poisson(profile.false_positive_rate, clutter.uniform(frame_index, 0));
    for (int i = 0; i < n_clutter && !boxes.empty(); ++i) {
        const auto slot = static_cast<std::uint64_t>(i) + 1;
        const auto pick = static_cast<std::size_t>(clutter.uniform(frame_index, 4 * slot) *
                                                   static_cast<double>(boxes.size()));
        Detection d;
        d.bbox = boxes[std::min(pick, boxes.size() - 1)];
        d.confidence = clamped_confidence(profile, clutter.gaussian(frame_index, 2 * slot + 1));
        out.push_back(d);
    }
    return out;
}

std::vector<Detection> filter_confidence(std::span<const Detection> detections, double floor) {
    std::vector<Detection> out;
    std::copy_if(detections.begin(), detections.end(), std::back_inserter(out),
                 [floor](const Detection& d) { return d.confidence >= floor; });
    return out;
}

std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold) {
    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].confidence > detections[b].confidence;
    });

    std::vector<bool> suppressed(detections.size(), false);
    std::vector<Detection> kept;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (suppressed[i]) {
            continue;
        }
        const Detection& best = detections[order[i]];
        kept.push_back(best);
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (!suppressed[j] && iou(best.bbox, detections[order[j]].bbox) > iou_threshold) {
                suppressed[j] = true;
            }
        }
    }
    return kept;
}

double throughput(const DetectorProfile& profile) {
    if (!(profile.seconds_per_image > 0.0)) {
        throw InvalidArgument("throughput: seconds_per_image must be > 0");
    }
    return 1.0 / profile.seconds_per_image;
}

}  // namespace sarquad
