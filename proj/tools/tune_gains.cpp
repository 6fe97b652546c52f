// Grid search used to pick the default altitude and attitude gains.
//
// Runs the noise-free closed loop from a ground start with a 1 m altitude
// setpoint (altitude sweep) or a 0.1 rad roll step at hover (attitude sweep)
// and prints overshoot and 2% settling time per candidate.

#include "sarquad/flight_stack.hpp"

#include <cstdio>
#include <cstring>
#include <vector>

using namespace sarquad;

namespace {

struct StepStats {
    double overshoot = 0.0;
    double settle_time = -1.0;
};

StepStats step_response(FlightConfig cfg, bool attitude, double duration) {
    QuadState start;
    Setpoints sp;
    sp.altitude = 1.0;
    if (attitude) {
        start.position.z() = 1.0;
    }
    FlightStack stack(without_noise(cfg), start);
    const double target = attitude ? 0.1 : 1.0;
    if (attitude) {
        sp.roll = target;
    }
    StepStats stats;
    double last_outside = 0.0;
    while (stack.time() < duration) {
        stack.step(sp);
        const double y = attitude ? stack.state().attitude.roll : stack.state().position.z();
        stats.overshoot = std::max(stats.overshoot, (y - target) / target);
        if (std::abs(y - target) > 0.02 * target) {
            last_outside = stack.time();
        }
    }
    stats.settle_time = last_outside;
    return stats;
}

}  // namespace

int main(int argc, char** argv) {
    const bool attitude = argc > 1 && std::strcmp(argv[1], "attitude") == 0;
    const std::vector<double> kps = attitude ? std::vector<double>{0.08, 0.12, 0.16}
                                             : std::vector<double>{0.15, 0.25, 0.35};
    const std::vector<double> kis = attitude ? std::vector<double>{0.0, 0.02}
                                             : std::vector<double>{0.0, 0.02, 0.05};
    const std::vector<double> kds = attitude ? std::vector<double>{0.015, 0.025, 0.035}
                                             : std::vector<double>{0.1, 0.2, 0.3};
    std::printf("%-6s %-6s %-6s %-10s %-10s\n", "kp", "ki", "kd", "overshoot", "settle_s");
    for (double kp : kps) {
        for (double ki : kis) {
            for (double kd : kds) {
                FlightConfig cfg;
                PidGains& g = attitude ? cfg.controllers.roll.gains : cfg.controllers.altitude.gains;
                g.kp = kp;
                g.ki = ki;
                g.kd = kd;
                const StepStats s = step_response(cfg, attitude, attitude ? 5.0 : 20.0);
                std::printf("%-6.3f %-6.3f %-6.3f %-10.4f %-10.3f\n", kp, ki, kd, s.overshoot, s.settle_time);
            }
        }
    }
    return 0;
}
