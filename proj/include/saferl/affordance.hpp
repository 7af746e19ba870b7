#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "saferl/world.hpp"

namespace saferl {

// The 20-component affordance state.
//
// Layout (fixed; CSV logs, datasets and the networks all use it):
//   indices 3*s .. 3*s+2 for slot s in {0:LF, 1:LR, 2:CF, 3:CR, 4:RF, 5:RR}
//     [3*s + 0]  relative longitudinal distance dx = x_other - x_ego   (m, signed)
//     [3*s + 1]  relative longitudinal velocity dv = vx_other - vx_ego (m/s, signed)
//     [3*s + 2]  relative lateral offset        dy = y_other - y_ego   (m, signed)
//   [18]  ego longitudinal velocity (m/s)
//   [19]  ego lateral position (m)
//
// Slot lanes are relative to the ego's lane (nearest lane center); L = +1
// lane (higher y), R = -1 lane. Front slots have dx >= 0, rear slots dx <= 0.
// An absent neighbor (none in range, or the lane does not exist) is encoded
// as the sentinel (+d_max for front / -d_max for rear, 0, nominal lane
// offset), i.e. a ghost car far away at the slot's lane center matching the
// ego's speed.
inline constexpr int kAffordanceDim = 20;
inline constexpr int kSlotCount = 6;

using AffordanceVector = std::array<double, kAffordanceDim>;

enum class Slot { LeftFront = 0, LeftRear, CenterFront, CenterRear, RightFront, RightRear };

inline constexpr int slot_index(Slot s) { return static_cast<int>(s); }
inline constexpr bool slot_is_front(int s) { return s % 2 == 0; }
inline constexpr int slot_lane_offset(int s) { return 1 - s / 2; }  // +1 left, 0 center, -1 right

using NeighborSlots = std::array<std::optional<NeighborHit>, kSlotCount>;

// Finds, for each of the 6 slots, the traffic vehicle with minimal |dx|
// whose lane (nearest lane center) matches. Off-road sides yield empty
// slots, as do lanes with nobody within d_max.
inline NeighborSlots nearest_neighbors(const WorldState& w, const SimConfig& cfg) {
    NeighborSlots slots;
    int ego_lane = cfg.lane_index(w.ego.y);
    for (int s = 0; s < kSlotCount; ++s) {
        int lane = ego_lane + slot_lane_offset(s);
        if (lane < 0 || lane >= SimConfig::kNumLanes) continue;
        slots[static_cast<std::size_t>(s)] =
            nearest_in_lane(w, w.ego, /*self_index=*/-1, lane, slot_is_front(s), cfg);
    }
    return slots;
}

inline AffordanceVector extract_affordance(const WorldState& w, const SimConfig& cfg) {
    AffordanceVector v{};
    NeighborSlots slots = nearest_neighbors(w, cfg);
    int ego_lane = cfg.lane_index(w.ego.y);
    for (int s = 0; s < kSlotCount; ++s) {
        const auto& hit = slots[static_cast<std::size_t>(s)];
        double dx, dv, dy;
        if (hit) {
            dx = hit->dx;
            dv = hit->dv;
            dy = hit->dy;
        } else {
            dx = slot_is_front(s) ? cfg.d_max : -cfg.d_max;
            dv = 0.0;
            int lane = ego_lane + slot_lane_offset(s);  // may be off-road; nominal offset anyway
            dy = cfg.lane_center(lane) - w.ego.y;
        }
        v[static_cast<std::size_t>(3 * s) + 0] = dx;
        v[static_cast<std::size_t>(3 * s) + 1] = dv;
        v[static_cast<std::size_t>(3 * s) + 2] = dy;
    }
    v[18] = w.ego.vx;
    v[19] = w.ego.y;
    return v;
}

// Network scale: longitudinal distances / d_max, velocities / v_max,
// lateral quantities / (3 * lane_width). All outputs fall in [-1.5, 1.5].
inline AffordanceVector normalize(const AffordanceVector& v, const SimConfig& cfg) {
    AffordanceVector n{};
    for (int s = 0; s < kSlotCount; ++s) {
        n[static_cast<std::size_t>(3 * s) + 0] = v[static_cast<std::size_t>(3 * s) + 0] / cfg.d_max;
        n[static_cast<std::size_t>(3 * s) + 1] = v[static_cast<std::size_t>(3 * s) + 1] / cfg.v_max;
        n[static_cast<std::size_t>(3 * s) + 2] = v[static_cast<std::size_t>(3 * s) + 2] / cfg.y_norm();
    }
    n[18] = v[18] / cfg.v_max;
    n[19] = v[19] / cfg.y_norm();
    return n;
}

inline AffordanceVector denormalize(const AffordanceVector& n, const SimConfig& cfg) {
    AffordanceVector v{};
    for (int s = 0; s < kSlotCount; ++s) {
        v[static_cast<std::size_t>(3 * s) + 0] = n[static_cast<std::size_t>(3 * s) + 0] * cfg.d_max;
        v[static_cast<std::size_t>(3 * s) + 1] = n[static_cast<std::size_t>(3 * s) + 1] * cfg.v_max;
        v[static_cast<std::size_t>(3 * s) + 2] = n[static_cast<std::size_t>(3 * s) + 2] * cfg.y_norm();
    }
    v[18] = n[18] * cfg.v_max;
    v[19] = n[19] * cfg.y_norm();
    return v;
}

}  // namespace saferl
