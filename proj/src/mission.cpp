#include "sarquad/mission.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <limits>
#include <sstream>

namespace sarquad {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& reason) {
    throw ConfigError(key, reason);
}

template <typename Fn>
void wrap_invalid(const std::string& key, Fn&& fn) {
    try {
        fn();
    } catch (const InvalidArgument& e) {
        bad(key, e.what());
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

void MissionConfig::validate() const {
    if (!(world.width > 0.0)) bad("world.width", "must be > 0");
    if (!(world.height > 0.0)) bad("world.height", "must be > 0");
    if (!(search_altitude > 0.0)) bad("search_altitude", "must be > 0");
    if (!(cruise_speed > 0.0)) bad("cruise_speed", "must be > 0");
    if (cruise_speed > flight.quad.max_speed) {
        bad("cruise_speed", "exceeds max_speed " + fmt(flight.quad.max_speed) + " m/s");
    }
    if (!(endurance > 0.0)) bad("endurance", "must be > 0");
    if (!(swath_overlap >= 0.0 && swath_overlap < 1.0)) bad("swath_overlap", "must be in [0, 1)");
    if (spawn.x() < 0.0 || spawn.x() > world.width || spawn.y() < 0.0 || spawn.y() > world.height) {
        bad("spawn", "must lie inside the world");
    }
    for (const GroundTarget& t : targets) {
        const std::string prefix = "target." + std::to_string(t.id);
        if (!(t.width > 0.0)) bad(prefix + ".width", "must be > 0");
        if (!(t.length > 0.0)) bad(prefix + ".length", "must be > 0");
        if (t.position.x() < 0.0 || t.position.x() > world.width || t.position.y() < 0.0 ||
            t.position.y() > world.height) {
            bad(prefix, "must lie inside the world");
        }
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            if (targets[i].id == targets[j].id) {
                bad("target." + std::to_string(targets[i].id), "duplicate target id");
            }
        }
    }
    if (!(nms_iou_threshold >= 0.0 && nms_iou_threshold <= 1.0)) bad("nms.iou_threshold", "must be in [0, 1]");
    if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) bad("detector.confidence_floor", "must be in [0, 1]");
    if (!(match_iou >= 0.0 && match_iou <= 1.0)) bad("detector.match_iou", "must be in [0, 1]");
    if (!(guidance.max_tilt > 0.0 && guidance.max_tilt <= kMaxTiltSetpoint)) {
        bad("guidance.max_tilt", "must be in (0, 0.5]");
    }
    if (!(guidance.position_gain > 0.0)) bad("guidance.position_gain", "must be > 0");
    if (!(guidance.velocity_gain > 0.0)) bad("guidance.velocity_gain", "must be > 0");
    if (!(guidance.max_accel > 0.0)) bad("guidance.max_accel", "must be > 0");
    if (!(guidance.acceptance_radius > 0.0)) bad("guidance.acceptance_radius", "must be > 0");
    if (!(guidance.takeoff_tolerance > 0.0)) bad("guidance.takeoff_tolerance", "must be > 0");

    wrap_invalid("detector", [&] { detector.validate(); });
    wrap_invalid("camera", [&] { camera.validate(); });
    wrap_invalid("boxes", [&] { (void)default_boxes(camera, boxes); });
    wrap_invalid("flight", [&] { flight.validate(); });

    const LawnmowerPlan plan = plan_lawnmower(world, camera, search_altitude, swath_overlap);
    const std::vector<GroundTarget> placed = place_targets(targets, plan, world);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].partial && placed[i].position == targets[i].position &&
            !placed[i].partial) {
            bad("target." + std::to_string(targets[i].id) + ".partial",
                "no uncovered swath edge inside the world (use swath_overlap = 0)");
        }
    }
}

LawnmowerPlan plan_lawnmower(const World& world, const CameraModel& camera, double altitude,
                             double overlap) {
    if (!(altitude > 0.0)) {
        throw InvalidArgument("plan_lawnmower: altitude must be > 0");
    }
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw InvalidArgument("plan_lawnmower: overlap must be in [0, 1)");
    }
    LawnmowerPlan plan;
    plan.swath = ground_footprint(camera, altitude).width_m;
    plan.spacing = plan.swath * (1.0 - overlap);
    const double ratio = world.height / plan.spacing;
    const int n = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
    const double span = (n - 1) * plan.spacing;
    const double y0 = 0.5 * world.height - 0.5 * span;
    for (int i = 0; i < n; ++i) {
        const double y = y0 + i * plan.spacing;
        plan.rows.push_back(y);
        const bool forward = i % 2 == 0;
        plan.waypoints.emplace_back(forward ? 0.0 : world.width, y);
        plan.waypoints.emplace_back(forward ? world.width : 0.0, y);
    }
    return plan;
}

std::vector<Vec2> generate_lawnmower(const World& world, const CameraModel& camera,
                                     double altitude, double overlap) {
    return plan_lawnmower(world, camera, altitude, overlap).waypoints;
}

std::vector<GroundTarget> place_targets(std::span<const GroundTarget> targets,
                                        const LawnmowerPlan& plan, const World& world) {
    std::vector<double> edges;
    const double half = 0.5 * plan.swath;
    for (double row : plan.rows) {
        for (double e : {row - half, row + half}) {
            const bool inside_world = e >= 0.0 && e <= world.height;
            const bool covered = std::any_of(plan.rows.begin(), plan.rows.end(), [&](double r) {
                return std::abs(e - r) < half - 1e-9;
            });
            if (inside_world && !covered) {
                edges.push_back(e);
            }
        }
    }

    std::vector<GroundTarget> out(targets.begin(), targets.end());
    for (GroundTarget& t : out) {
        if (!t.partial) {
            continue;
        }
        if (edges.empty()) {
            t.partial = false;  // flags the placement failure to validate()
            continue;
        }
        const double y = t.position.y();
        const double best = *std::min_element(edges.begin(), edges.end(), [y](double a, double b) {
            return std::abs(a - y) < std::abs(b - y);
        });
        t.position.y() = best;
    }
    return out;
}

std::vector<ScheduledFrame> frame_schedule(double camera_rate, const DetectorProfile& profile,
                                           double duration) {
    if (!(camera_rate > 0.0) || !(profile.seconds_per_image > 0.0)) {
        throw InvalidArgument("frame_schedule: rates must be > 0");
    }
    const double spi = profile.seconds_per_image;
    auto capture_time = [camera_rate](std::uint64_t i) { return static_cast<double>(i) / camera_rate; };

    std::vector<ScheduledFrame> frames;
    std::uint64_t next = 0;   // first frame not yet taken or dropped
    double free_at = 0.0;
    while (true) {
        // Newest frame already captured when the detector frees up.
        auto newest = static_cast<std::uint64_t>(std::floor(free_at * camera_rate));
        while (capture_time(newest + 1) <= free_at) ++newest;
        while (newest > 0 && capture_time(newest) > free_at) --newest;

        ScheduledFrame f;
        if (capture_time(newest) <= free_at && newest >= next) {
            f.frame_index = newest;
            f.start_time = free_at;
        } else {
            f.frame_index = next;
            f.start_time = capture_time(next);
        }
        f.capture_time = capture_time(f.frame_index);
        f.done_time = f.start_time + spi;
        if (f.done_time > duration) {
            break;
        }
        frames.push_back(f);
        next = f.frame_index + 1;
        free_at = f.done_time;
    }
    return frames;
}

namespace {

class WaypointFollower {
public:
    WaypointFollower(const MissionConfig& cfg, std::vector<Vec2> waypoints)
        : cfg_(cfg), waypoints_(std::move(waypoints)), from_(cfg.spawn) {}

    bool done() const { return done_; }

    Setpoints update(const QuadState& nav, double est_yaw) {
        Setpoints sp;
        sp.altitude = cfg_.search_altitude;
        const Vec2 p = nav.position.head<2>();
        const Vec2 v = nav.velocity.head<2>();

        Vec2 v_des = Vec2::Zero();
        if (taking_off_) {
            v_des = -cfg_.guidance.position_gain * (p - cfg_.spawn);
            sp.yaw = heading_;
            if (nav.position.z() >= cfg_.search_altitude - cfg_.guidance.takeoff_tolerance) {
                taking_off_ = false;
            }
        } else if (!done_) {
            const Vec2 to = waypoints_[index_];
            if ((to - p).norm() < cfg_.guidance.acceptance_radius) {
                from_ = to;
                if (++index_ >= waypoints_.size()) {
                    done_ = true;
                    sp.yaw = heading_;
                    return sp;
                }
            }
            const Vec2 target = waypoints_[index_];
            const Vec2 seg = target - from_;
            const double len = seg.norm();
            const Vec2 dir = len > 1e-9 ? Vec2(seg / len) : Vec2((target - p).normalized());
            if (len > 1e-9) {
                heading_ = std::atan2(dir.y(), dir.x());
            }
            const Vec2 rel = p - from_;
            const double along = rel.dot(dir);
            const Vec2 cross = rel - along * dir;
            const double remaining = (len > 1e-9 ? len : (target - p).norm()) - along;
            const double cruise = cfg_.cruise_speed;
            const double v_along = std::clamp(cfg_.guidance.position_gain * remaining, -cruise, cruise);
            Vec2 v_cross = -cfg_.guidance.position_gain * cross;
            if (v_cross.norm() > cruise) {
                v_cross *= cruise / v_cross.norm();
            }
            v_des = v_along * dir + v_cross;
            sp.yaw = heading_;
        } else {
            sp.yaw = heading_;
        }

        const QuadParams& q = cfg_.flight.quad;
        Vec2 a = cfg_.guidance.velocity_gain * (v_des - v) + (q.drag_coeff / q.mass) * v;
        if (a.norm() > cfg_.guidance.max_accel) {
            a *= cfg_.guidance.max_accel / a.norm();
        }
        const double c = std::cos(nav.attitude.yaw), s = std::sin(nav.attitude.yaw);
        const double a_fwd = c * a.x() + s * a.y();
        const double a_left = -s * a.x() + c * a.y();
        const double g = q.gravity;
        const double tilt = cfg_.guidance.max_tilt;
        sp.pitch = std::clamp(std::atan(a_fwd / g), -tilt, tilt);
        sp.roll = std::clamp(-std::atan(a_left / g), -tilt, tilt);
        // The yaw loop regulates the estimate; express the heading in its frame.
        sp.yaw = wrap_angle(sp.yaw + (est_yaw - nav.attitude.yaw));
        return sp;
    }

private:
    const MissionConfig& cfg_;
    std::vector<Vec2> waypoints_;
    Vec2 from_;
    std::size_t index_ = 0;
    double heading_ = 0.0;
    bool taking_off_ = true;
    bool done_ = false;
};

class CoverageGrid {
public:
    explicit CoverageGrid(const World& w)
        : nx_(std::max(1, static_cast<int>(std::ceil(w.width)))),
          ny_(std::max(1, static_cast<int>(std::ceil(w.height)))),
          seen_(static_cast<std::size_t>(nx_) * ny_, false) {}

    void sweep(const QuadState& state, const CameraModel& camera) {
        const double h = state.position.z();
        if (!(h > 0.0)) {
            return;
        }
        const Footprint fp = ground_footprint(camera, h);
        const Vec2 center = view_center(state);
        const double c = std::cos(state.attitude.yaw), s = std::sin(state.attitude.yaw);
        const double half_fwd = 0.5 * fp.height_m, half_left = 0.5 * fp.width_m;
        const double reach = std::hypot(half_fwd, half_left);
        const int i0 = std::max(0, static_cast<int>(std::floor(center.x() - reach)));
        const int i1 = std::min(nx_ - 1, static_cast<int>(std::ceil(center.x() + reach)));
        const int j0 = std::max(0, static_cast<int>(std::floor(center.y() - reach)));
        const int j1 = std::min(ny_ - 1, static_cast<int>(std::ceil(center.y() + reach)));
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const double dx = i + 0.5 - center.x(), dy = j + 0.5 - center.y();
                const double fwd = c * dx + s * dy;
                const double left = -s * dx + c * dy;
                if (std::abs(fwd) <= half_fwd && std::abs(left) <= half_left) {
                    auto idx = static_cast<std::size_t>(j) * nx_ + i;
                    if (!seen_[idx]) {
                        seen_[idx] = true;
                        ++count_;
                    }
                }
            }
        }
    }

    double fraction() const { return static_cast<double>(count_) / static_cast<double>(seen_.size()); }

private:
    int nx_;
    int ny_;
    std::vector<bool> seen_;
    std::size_t count_ = 0;
};

struct PendingFrame {
    ScheduledFrame frame;
    std::vector<Sighting> sightings;
    std::vector<Detection> detections;
};

}  // namespace

MissionResult run_mission(const MissionConfig& config) {
    config.validate();

    MissionResult result;
    result.profile_name = config.detector.name;
    const LawnmowerPlan plan =
        plan_lawnmower(config.world, config.camera, config.search_altitude, config.swath_overlap);
    result.targets = place_targets(config.targets, plan, config.world);
    const std::vector<BBox> boxes = default_boxes(config.camera, config.boxes);
    const std::vector<ScheduledFrame> schedule =
        frame_schedule(config.camera.frame_rate_hz, config.detector, config.endurance);

    FlightConfig flight = config.flight;
    flight.seed = config.seed;
    QuadState start;
    start.position = Vec3(config.spawn.x(), config.spawn.y(), 0.0);
    FlightStack stack(flight, start);
    WaypointFollower follower(config, plan.waypoints);
    CoverageGrid coverage(config.world);

    MissionMetrics& m = result.metrics;
    m.targets_total = static_cast<int>(result.targets.size());
    m.target_detection_times.assign(result.targets.size(), std::nullopt);

    const auto control_div = static_cast<std::int64_t>(
        std::llround(1.0 / (flight.control_rate * flight.physics_dt)));
    const double camera_rate = config.camera.frame_rate_hz;
    std::uint64_t next_capture = 0;
    std::size_t next_scheduled = 0;
    std::deque<PendingFrame> pending;
    double confidence_sum = 0.0;
    double roll_sq = 0.0, pitch_sq = 0.0, alt_sq = 0.0;
    std::int64_t error_samples = 0;
    Setpoints setpoints;
    setpoints.altitude = config.search_altitude;

    auto complete = [&](PendingFrame& pf) {
        ++m.frames_processed;
        for (const Detection& d : pf.detections) {
            DetectionEvent ev{pf.frame.frame_index, pf.frame.done_time, d};
            result.detections.push_back(ev);
            ++m.detections_emitted;
            confidence_sum += d.confidence;
            if (!d.target_id || d.confidence < config.confidence_floor) {
                continue;
            }
            const auto it = std::find_if(pf.sightings.begin(), pf.sightings.end(),
                                         [&](const Sighting& s) { return s.target_id == *d.target_id; });
            if (it == pf.sightings.end() || iou(d.bbox, it->bbox) < config.match_iou) {
                continue;
            }
            for (std::size_t k = 0; k < result.targets.size(); ++k) {
                if (result.targets[k].id == *d.target_id && !m.target_detection_times[k]) {
                    m.target_detection_times[k] = pf.frame.done_time;
                    ++m.targets_detected;
                    if (!m.time_to_first_detection) {
                        m.time_to_first_detection = pf.frame.done_time;
                    }
                }
            }
        }
    };

    while (true) {
        const double t = stack.time();
        if (t >= config.endurance) {
            break;
        }

        while (static_cast<double>(next_capture) / camera_rate <= t) {
            ++m.frames_captured;
            coverage.sweep(stack.state(), config.camera);
            if (next_scheduled < schedule.size() && schedule[next_scheduled].frame_index == next_capture) {
                PendingFrame pf;
                pf.frame = schedule[next_scheduled++];
                for (const GroundTarget& target : result.targets) {
                    if (auto s = project_target(stack.state(), config.camera, target)) {
                        m.max_sighting_visibility = std::max(m.max_sighting_visibility, s->visibility);
                        pf.sightings.push_back(*s);
                    }
                }
                const std::vector<Detection> raw = simulate_detector(
                    pf.sightings, config.detector, boxes, pf.frame.frame_index, config.seed);
                const std::vector<Detection> confident = filter_confidence(raw, config.confidence_floor);
                pf.detections = nms(confident, config.nms_iou_threshold);
                pending.push_back(std::move(pf));
            }
            ++next_capture;
        }
        while (!pending.empty() && pending.front().frame.done_time <= t) {
            complete(pending.front());
            pending.pop_front();
        }

        const QuadState before = stack.state();
        if (stack.tick() % control_div == 0) {
            setpoints = follower.update(before, stack.estimate().yaw);
        }
        if (follower.done()) {
            m.path_completed = true;
            break;
        }
        if (stack.step(setpoints)) {
            const AttitudeEstimate& est = stack.estimate();
            const double er = wrap_angle(est.roll - before.attitude.roll);
            const double ep = wrap_angle(est.pitch - before.attitude.pitch);
            const double ea = est.altitude - before.position.z();
            roll_sq += er * er;
            pitch_sq += ep * ep;
            alt_sq += ea * ea;
            ++error_samples;
            if (config.record_telemetry) {
                result.telemetry.push_back({t, before.position, before.attitude, est, stack.motors()});
            }
        }
        if (stack.crashed()) {
            m.crashed = true;
            break;
        }
    }

    m.flight_time = stack.time();
    // Frames finishing on the final tick still count.
    while (!pending.empty() && pending.front().frame.done_time <= m.flight_time + 1e-9) {
        complete(pending.front());
        pending.pop_front();
    }
    m.coverage_fraction = coverage.fraction();
    if (m.detections_emitted > 0) {
        m.mean_confidence = confidence_sum / m.detections_emitted;
    }
    if (error_samples > 0) {
        const auto n = static_cast<double>(error_samples);
        m.rms_roll_error = std::sqrt(roll_sq / n);
        m.rms_pitch_error = std::sqrt(pitch_sq / n);
        m.rms_altitude_error = std::sqrt(alt_sq / n);
    }
    return result;
}

std::vector<MissionResult> compare_profiles(const MissionConfig& config,
                                            std::span<const DetectorProfile> profiles) {
    if (profiles.size() < 2) {
        throw InvalidArgument("compare_profiles: need at least two profiles");
    }
    std::vector<std::future<MissionResult>> runs;
    for (const DetectorProfile& p : profiles) {
        MissionConfig c = config;
        c.detector = p;
        runs.push_back(std::async(std::launch::async, [c = std::move(c)] { return run_mission(c); }));
    }
    std::vector<MissionResult> out;
    for (auto& f : runs) {
        out.push_back(f.get());
    }
    return out;
}

}  // namespace sarquad
