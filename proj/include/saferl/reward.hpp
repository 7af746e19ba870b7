#pragma once

#include <algorithm>
#include <cmath>

#include "saferl/affordance.hpp"

namespace saferl {

struct RewardParams {
    double v_des;   // m/s
    double y_des;   // m
    double tau;     // s, headway time
    double d_min;   // m, headway floor; d_safe = max(d_min, tau * v)
};

// Each component is <= 0 everywhere and 0 exactly on target.

inline double reward_speed(double v_ex, double v_des) {
    double d = v_ex - v_des;
    return std::exp(-d * d / 10.0) - 1.0;
}

inline double reward_lane(double d_ey, double y_des) {
    double d = d_ey - y_des;
    return std::exp(-d * d / 10.0) - 1.0;
}

inline double reward_headway(double d_lead, double d_safe) {
    if (d_lead >= d_safe) return 0.0;
    double d = d_lead - d_safe;
    return std::exp(-d * d / (10.0 * d_safe)) - 1.0;
}

struct RewardBreakdown {
    double speed = 0.0;
    double lane = 0.0;
    double headway = 0.0;
    double total = 0.0;
};

// Combines the three components (weighted sum; unit weights by default).
// d_lead comes from the center-front slot (d_max when absent); y_des is the
// current lane center, or a fixed lane center under lane_policy = "fixed".
inline RewardBreakdown total_reward(const WorldState& w, const SimConfig& cfg) {
    double y_des = cfg.lane_policy == "fixed"
                       ? cfg.lane_center(static_cast<int>(cfg.fixed_lane))
                       : cfg.lane_center(cfg.lane_index(w.ego.y));
    double d_lead = cfg.d_max;
    if (auto lead = nearest_in_lane(w, w.ego, -1, cfg.lane_index(w.ego.y), true, cfg))
        d_lead = std::abs(lead->dx);
    double d_safe = std::max(cfg.headway_d_min, cfg.headway_tau * w.ego.vx);

    RewardBreakdown r;
    r.speed = cfg.w_speed * reward_speed(w.ego.vx, cfg.v_des);
    r.lane = cfg.w_lane * reward_lane(w.ego.y, y_des);
    r.headway = cfg.w_headway * reward_headway(d_lead, d_safe);
    r.total = r.speed + r.lane + r.headway;
    return r;
}

}  // namespace saferl
