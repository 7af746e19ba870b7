#pragma once

#include <cmath>
#include <limits>

#include "saferl/affordance.hpp"
#include "saferl/safety.hpp"

namespace saferl {

struct FilterOutcome {
    Action executed;
    bool violated = false;
    Action original;
};

namespace detail {

// Closing speed toward the ego for a slot hit: front cars close when the ego
// is faster, rear cars when they are faster.
inline double closing_speed(const NeighborHit& hit, bool front) {
    return front ? -hit.dv : hit.dv;
}

}  // namespace detail

// The handcrafted action filter. Longitudinal (lane-keep) proposals are
// checked against the current-lane lead; lane changes against the target
// lane's front and rear. If any check fails the proposal is replaced by the
// TTC-ladder fallback evaluated at the smallest relevant TTC. A lane change
// proposed while a maneuver is already latched behaves as lane-keep (the
// dynamics would ignore the lateral command anyway), as does an off-road
// one.
inline FilterOutcome filter_action(const WorldState& w, Action proposed, const SimConfig& cfg) {
    const SafetyParams p = ego_safety(cfg);
    NeighborSlots slots = nearest_neighbors(w, cfg);

    bool lane_change = proposed.lateral() != LatCmd::Keep && !w.ego.lane_change;
    if (lane_change) {
        int ego_lane = cfg.lane_index(w.ego.y);
        int target = ego_lane + (proposed.lateral() == LatCmd::Left ? 1 : -1);
        if (target < 0 || target >= SimConfig::kNumLanes) lane_change = false;
    }

    bool ok = true;
    double min_ttc = std::numeric_limits<double>::infinity();
    auto check = [&](Slot s) {
        const auto& hit = slots[static_cast<std::size_t>(slot_index(s))];
        if (!hit) return;
        bool front = slot_is_front(slot_index(s));
        double closing = detail::closing_speed(*hit, front);
        if (!gap_rule(std::abs(hit->dx), closing, p)) ok = false;
        min_ttc = std::min(min_ttc, time_to_collision(std::abs(hit->dx), closing));
    };

    if (lane_change) {
        if (proposed.lateral() == LatCmd::Left) {
            check(Slot::LeftFront);
            check(Slot::LeftRear);
        } else {
            check(Slot::RightFront);
            check(Slot::RightRear);
        }
    } else {
        check(Slot::CenterFront);
    }

    if (ok) return FilterOutcome{proposed, false, proposed};
    return FilterOutcome{safe_fallback(min_ttc, p), true, proposed};
}

}  // namespace saferl
