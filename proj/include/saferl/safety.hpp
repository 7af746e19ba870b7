#pragma once

#include <limits>

#include "saferl/action.hpp"
#include "saferl/config.hpp"

namespace saferl {

struct SafetyParams {
    double t_min;        // s, headway factor on closing speed (Eq.-8-style gap rule)
    double d_tv_min;     // m, minimum gap
    double t_hard_brake; // s, TTC at or below which the fallback hard-brakes
    double t_brake;      // s, TTC at or below which the fallback brakes
};

inline SafetyParams ego_safety(const SimConfig& cfg) {
    return {cfg.safety_t_min, cfg.safety_d_tv_min, cfg.safety_t_hard_brake, cfg.safety_t_brake};
}

inline SafetyParams traffic_safety(const SimConfig& cfg) {
    return {cfg.traffic_t_min, cfg.traffic_d_tv_min, cfg.traffic_t_hard_brake, cfg.traffic_t_brake};
}

// Minimum-gap predicate. v_closing is positive when the vehicles approach
// each other; receding vehicles (v_closing <= 0) enlarge the margin. Safe
// only on strict inequality.
inline bool gap_rule(double d_tv, double v_closing, const SafetyParams& p) {
    return d_tv - p.t_min * v_closing > p.d_tv_min;
}

// d / v_closing; infinite when not closing.
inline double time_to_collision(double d, double v_closing) {
    if (v_closing <= 0.0) return std::numeric_limits<double>::infinity();
    return d / v_closing;
}

// Fallback ladder: hard-brake, brake or maintain by TTC tier, always
// lane-keeping.
inline Action safe_fallback(double ttc, const SafetyParams& p) {
    if (ttc <= p.t_hard_brake) return kHardBrakeKeep;
    if (ttc <= p.t_brake) return kBrakeKeep;
    return kMaintainKeep;
}

}  // namespace saferl
