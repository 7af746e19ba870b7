#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "saferl/rng.hpp"
#include "saferl/safety.hpp"
#include "saferl/vehicle.hpp"

namespace saferl {

struct TrafficVehicle {
    VehicleState state;
    double desired_speed = 0.0;  // per-vehicle speed cap, m/s
};

struct StepEvents {
    bool collided = false;
    bool static_violation = false;          // set by the agent layer when the filter fires
    bool proposed_action_replaced = false;  // off-road lane change rejected (or filter replacement)
    bool episode_done = false;
};

struct WorldState {
    VehicleState ego;
    std::vector<TrafficVehicle> traffic;
    long t = 0;
    bool done = false;
    bool spawn_reduced = false;  // spawn had to drop vehicles to stay collision-free
    Rng rng;                     // drives all traffic decisions for this episode
};

// One vehicle found by a lane scan, relative to a reference vehicle.
// index is -1 for the ego, otherwise the traffic index.
struct NeighborHit {
    int index;
    double dx;  // x_other - x_ref (signed)
    double dv;  // vx_other - vx_ref (signed)
    double dy;  // y_other - y_ref (signed)
};

namespace detail {

inline const VehicleState& vehicle_at(const WorldState& w, int index) {
    return index < 0 ? w.ego : w.traffic[static_cast<std::size_t>(index)].state;
}

template <class Fn>
inline void for_each_other_vehicle(const WorldState& w, int self_index, Fn&& fn) {
    if (self_index != -1) fn(-1, w.ego);
    for (std::size_t i = 0; i < w.traffic.size(); ++i) {
        if (static_cast<int>(i) == self_index) continue;
        fn(static_cast<int>(i), w.traffic[i].state);
    }
}

}  // namespace detail

// Nearest vehicle in `lane` relative to `ref`, scanning ego + traffic except
// self_index. Front means dx >= 0. Vehicles beyond d_max are invisible.
inline std::optional<NeighborHit> nearest_in_lane(const WorldState& w, const VehicleState& ref,
                                                  int self_index, int lane, bool front,
                                                  const SimConfig& cfg) {
    std::optional<NeighborHit> best;
    detail::for_each_other_vehicle(w, self_index, [&](int idx, const VehicleState& v) {
        if (cfg.lane_index(v.y) != lane) return;
        double dx = v.x - ref.x;
        if (front ? dx < 0.0 : dx >= 0.0) return;
        if (std::abs(dx) > cfg.d_max) return;
        if (!best || std::abs(dx) < std::abs(best->dx)) {
            best = NeighborHit{idx, dx, v.vx - ref.vx, v.y - ref.y};
        }
    });
    return best;
}

// Rule-based traffic controller: tracks the per-vehicle desired speed, keeps
// headway by the gap rule + TTC ladder (traffic thresholds), and proposes
// random lane changes gated on the target-lane front and rear gaps.
inline Action traffic_policy(const WorldState& w, std::size_t i, const SimConfig& cfg, Rng& rng) {
    const TrafficVehicle& self = w.traffic[i];
    const SafetyParams tp = traffic_safety(cfg);
    const int lane = cfg.lane_index(self.state.y);
    const int self_index = static_cast<int>(i);

    LongCmd lon = LongCmd::Maintain;
    bool headway_fail = false;
    if (auto lead = nearest_in_lane(w, self.state, self_index, lane, true, cfg)) {
        double closing = -lead->dv;  // v_self - v_front
        if (!gap_rule(std::abs(lead->dx), closing, tp)) {
            headway_fail = true;
            lon = safe_fallback(time_to_collision(std::abs(lead->dx), closing), tp).longitudinal();
        }
    }
    if (!headway_fail) {
        if (self.state.vx + cfg.ax_accelerate * cfg.dt <= self.desired_speed)
            lon = LongCmd::Accelerate;
        else if (self.state.vx > self.desired_speed)
            lon = LongCmd::Brake;
    }

    LatCmd lat = LatCmd::Keep;
    if (!self.state.lane_change && uniform_real(rng, 0.0, 1.0) < cfg.p_lane_change * cfg.dt) {
        bool can_left = lane + 1 < SimConfig::kNumLanes;
        bool can_right = lane - 1 >= 0;
        LatCmd want = LatCmd::Keep;
        if (can_left && can_right)
            want = uniform_int(rng, 0, 1) == 0 ? LatCmd::Left : LatCmd::Right;
        else if (can_left)
            want = LatCmd::Left;
        else if (can_right)
            want = LatCmd::Right;
        if (want != LatCmd::Keep) {
            int target = lane + (want == LatCmd::Left ? 1 : -1);
            bool ok = true;
            if (auto tf = nearest_in_lane(w, self.state, self_index, target, true, cfg))
                ok = ok && gap_rule(std::abs(tf->dx), -tf->dv, tp);
            if (auto tr = nearest_in_lane(w, self.state, self_index, target, false, cfg))
                ok = ok && gap_rule(std::abs(tr->dx), tr->dv, tp);
            if (ok) lat = want;
        }
    }

    if (lat != LatCmd::Keep) {
        // lane changes only combine with maintain/brake; emergencies drop the change
        if (lon == LongCmd::HardBrake) return kHardBrakeKeep;
        if (lon == LongCmd::Accelerate) lon = LongCmd::Maintain;
        return *Action::from_parts(lon, lat);
    }
    return *Action::from_parts(lon, LatCmd::Keep);
}

// The six spawn slots: (lane 0..2) x (front, rear) around the ego.
inline WorldState spawn_episode(const SimConfig& cfg, std::uint64_t seed) {
    WorldState w;
    w.rng = make_rng(seed);
    w.ego.x = 0.0;
    w.ego.y = cfg.lane_center(1);
    w.ego.vx = cfg.ego_initial_speed;

    int want = uniform_int(w.rng, static_cast<int>(cfg.traffic_min), static_cast<int>(cfg.traffic_max));

    for (int attempt = 0;; ++attempt) {
        // pick `want` of the 6 slots
        std::array<int, 6> slots = {0, 1, 2, 3, 4, 5};
        for (int k = 5; k > 0; --k) std::swap(slots[k], slots[uniform_int(w.rng, 0, k)]);
        std::sort(slots.begin(), slots.begin() + want);

        std::vector<TrafficVehicle> traffic;
        traffic.reserve(static_cast<std::size_t>(want));
        for (int s = 0; s < want; ++s) {
            int slot = slots[static_cast<std::size_t>(s)];
            int lane = slot / 2;
            bool front = (slot % 2) == 0;
            double gap = uniform_real(w.rng, cfg.spawn_gap_min, cfg.spawn_gap_max);
            double speed = uniform_real(w.rng, cfg.traffic_speed_min, cfg.traffic_speed_max);
            TrafficVehicle tv;
            tv.state.x = w.ego.x + (front ? gap : -gap);
            tv.state.y = cfg.lane_center(lane);
            tv.state.vx = speed;
            tv.desired_speed = speed;
            traffic.push_back(tv);
        }

        bool clear = true;
        for (std::size_t a = 0; a < traffic.size() && clear; ++a) {
            if (detect_collision(traffic[a].state, w.ego, cfg)) clear = false;
            for (std::size_t b = a + 1; b < traffic.size() && clear; ++b)
                if (detect_collision(traffic[a].state, traffic[b].state, cfg)) clear = false;
        }
        if (clear) {
            w.traffic = std::move(traffic);
            return w;
        }
        if (attempt + 1 >= cfg.spawn_retries) {
            if (want == 0) return w;  // ego only
            want -= 1;
            w.spawn_reduced = true;
            attempt = -1;
        }
    }
}

// Advances the world one step: traffic decisions are taken on the pre-step
// state, then every vehicle moves simultaneously. Collision is checked
// ego-vs-each-traffic only.
inline StepEvents step_world(WorldState& w, Action ego_action, const SimConfig& cfg) {
    if (w.done) throw std::logic_error("step_world called on a finished episode");

    std::vector<Action> traffic_actions;
    traffic_actions.reserve(w.traffic.size());
    for (std::size_t i = 0; i < w.traffic.size(); ++i)
        traffic_actions.push_back(traffic_policy(w, i, cfg, w.rng));

    StepEvents ev;
    bool rejected = false;
    w.ego = apply_action(w.ego, ego_action, cfg, &rejected);
    ev.proposed_action_replaced = rejected;
    for (std::size_t i = 0; i < w.traffic.size(); ++i)
        w.traffic[i].state = apply_action(w.traffic[i].state, traffic_actions[i], cfg);

    w.t += 1;
    for (const auto& tv : w.traffic)
        if (detect_collision(w.ego, tv.state, cfg)) ev.collided = true;

    ev.episode_done = ev.collided || w.t >= cfg.episode_steps;
    w.done = ev.episode_done;
    return ev;
}

}  // namespace saferl
