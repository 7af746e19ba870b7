#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "saferl/action.hpp"
#include "saferl/config.hpp"

namespace saferl {

// Latched lane-change maneuver: once started it runs to completion and
// further lateral commands are ignored.
struct LaneChange {
    int target_lane = 0;
    int steps_left = 0;
};

struct VehicleState {
    double x = 0.0;   // longitudinal position, m
    double y = 0.0;   // lateral position, m
    double vx = 0.0;  // longitudinal velocity, m/s
    double vy = 0.0;  // lateral velocity, m/s (nonzero only mid-maneuver)
    double ax = 0.0;  // commanded longitudinal acceleration, m/s^2
    std::optional<LaneChange> lane_change;
};

// Discrete double integrator. Position advances with the pre-update
// velocity; velocity is clipped into [0, v_max] afterwards.
inline VehicleState step_longitudinal(VehicleState s, double ax, double dt, double v_max) {
    s.x += s.vx * dt;
    s.vx = std::clamp(s.vx + ax * dt, 0.0, v_max);
    s.ax = ax;
    return s;
}

// Kinematic lateral step. During a latched maneuver the vehicle snaps to the
// target lane center as soon as the step reaches/crosses it or lands within
// snap_tol, which also ends the maneuver.
inline VehicleState step_lateral(VehicleState s, double vy, double dt, const SimConfig& cfg) {
    double y_new = s.y + vy * dt;
    if (s.lane_change) {
        double center = cfg.lane_center(s.lane_change->target_lane);
        bool crossed = (s.y - center) * (y_new - center) <= 0.0 && vy != 0.0;
        if (crossed || std::abs(y_new - center) < cfg.snap_tol) {
            y_new = center;
            s.lane_change.reset();
            vy = 0.0;
        } else {
            s.lane_change->steps_left -= 1;
            if (s.lane_change->steps_left <= 0) {  // ran out of steps: settle on the center
                y_new = center;
                s.lane_change.reset();
                vy = 0.0;
            }
        }
    }
    s.y = y_new;
    s.vy = vy;
    return s;
}

inline double longitudinal_accel(LongCmd cmd, const SimConfig& cfg) {
    switch (cmd) {
        case LongCmd::Maintain: return 0.0;
        case LongCmd::Accelerate: return cfg.ax_accelerate;
        case LongCmd::Brake: return cfg.ax_brake;
        case LongCmd::HardBrake: return cfg.ax_hard_brake;
    }
    return 0.0;
}

// Applies one discrete action for one step. A lateral command latches a
// maneuver toward the adjacent lane center with vy = +-lane_width/T_lc for
// ceil(T_lc/dt) steps. While a maneuver is latched, lateral commands are
// ignored. An off-road lane change is rejected and executed as lane-keep
// with the same longitudinal component; *rejected reports it.
inline VehicleState apply_action(VehicleState s, Action a, const SimConfig& cfg,
                                 bool* rejected = nullptr) {
    if (rejected) *rejected = false;

    double vy = 0.0;
    if (s.lane_change) {
        int dir = cfg.lane_center(s.lane_change->target_lane) > s.y ? 1 : -1;
        vy = dir * cfg.lane_width / cfg.lane_change_duration;
    } else if (a.lateral() != LatCmd::Keep) {
        int current = cfg.lane_index(s.y);
        int target = current + (a.lateral() == LatCmd::Left ? 1 : -1);
        if (target < 0 || target >= SimConfig::kNumLanes) {
            if (rejected) *rejected = true;
        } else {
            int steps = static_cast<int>(std::ceil(cfg.lane_change_duration / cfg.dt));
            s.lane_change = LaneChange{target, steps};
            int dir = a.lateral() == LatCmd::Left ? 1 : -1;
            vy = dir * cfg.lane_width / cfg.lane_change_duration;
        }
    }

    s = step_longitudinal(s, longitudinal_accel(a.longitudinal(), cfg), cfg.dt, cfg.v_max);
    s = step_lateral(s, vy, cfg.dt, cfg);
    return s;
}

// Rectangle-overlap collision with strict inequalities; exact boundary
// contact counts as no collision so boundary tests are deterministic.
inline bool detect_collision(const VehicleState& a, const VehicleState& b, const SimConfig& cfg) {
    return std::abs(a.x - b.x) < cfg.car_length && std::abs(a.y - b.y) < cfg.car_width;
}

}  // namespace saferl
