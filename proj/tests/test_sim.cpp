#include <gtest/gtest.h>

#include "saferl/world.hpp"

using namespace saferl;

namespace {

SimConfig cfg() { return SimConfig{}; }

VehicleState at(double x, double y, double vx) {
    VehicleState s;
    s.x = x;
    s.y = y;
    s.vx = vx;
    return s;
}

}  // namespace

TEST(Action, TableIsTheDocumentedBijection) {
    // 4 longitudinal x keep, plus {left,right} x {maintain,brake}
    const std::array<std::pair<LongCmd, LatCmd>, 8> expected = {{
        {LongCmd::Maintain, LatCmd::Keep},
        {LongCmd::Accelerate, LatCmd::Keep},
        {LongCmd::Brake, LatCmd::Keep},
        {LongCmd::HardBrake, LatCmd::Keep},
        {LongCmd::Maintain, LatCmd::Left},
        {LongCmd::Brake, LatCmd::Left},
        {LongCmd::Maintain, LatCmd::Right},
        {LongCmd::Brake, LatCmd::Right},
    }};
    for (int i = 0; i < Action::kCount; ++i) {
        Action a(i);
        EXPECT_EQ(a.longitudinal(), expected[i].first) << "id " << i;
        EXPECT_EQ(a.lateral(), expected[i].second) << "id " << i;
        auto back = Action::from_parts(expected[i].first, expected[i].second);
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(back->id(), i);
    }
    EXPECT_FALSE(Action::from_parts(LongCmd::Accelerate, LatCmd::Left).has_value());
    EXPECT_FALSE(Action::from_parts(LongCmd::HardBrake, LatCmd::Right).has_value());
    EXPECT_THROW(Action(8), std::invalid_argument);
}

TEST(StepLongitudinal, ZeroAcceleration) {
    auto s = step_longitudinal(at(0, 0, 20), 0.0, 0.1, 40.0);
    EXPECT_DOUBLE_EQ(s.x, 2.0);
    EXPECT_DOUBLE_EQ(s.vx, 20.0);
}

TEST(StepLongitudinal, PositionUsesPreUpdateVelocity) {
    auto s = step_longitudinal(at(0, 0, 20), 2.0, 0.1, 40.0);
    EXPECT_DOUBLE_EQ(s.x, 2.0);  // not 2.02
    EXPECT_DOUBLE_EQ(s.vx, 20.2);
}

TEST(StepLongitudinal, VelocityClippedAtZero) {
    auto s = step_longitudinal(at(0, 0, 0.1), -8.0, 0.1, 40.0);
    EXPECT_DOUBLE_EQ(s.x, 0.01);
    EXPECT_DOUBLE_EQ(s.vx, 0.0);
}

TEST(StepLongitudinal, VelocityClippedAtVmax) {
    auto s = step_longitudinal(at(0, 0, 39.95), 2.0, 0.1, 40.0);
    EXPECT_DOUBLE_EQ(s.vx, 40.0);
}

TEST(StepLateral, IdentityWithoutVelocity) {
    auto s = step_lateral(at(0, 0, 30), 0.0, 0.1, cfg());
    EXPECT_DOUBLE_EQ(s.y, 0.0);
}

TEST(StepLateral, PlainKinematicStep) {
    auto s = step_lateral(at(0, 0, 30), 1.85, 0.1, cfg());
    EXPECT_DOUBLE_EQ(s.y, 0.185);
}

TEST(StepLateral, SnapsOnReachingTargetCenter) {
    VehicleState s = at(0, 3.66, 30);
    s.lane_change = LaneChange{1, 5};
    s = step_lateral(s, 1.85, 0.1, cfg());
    EXPECT_DOUBLE_EQ(s.y, 3.7);
    EXPECT_FALSE(s.lane_change.has_value());
    EXPECT_DOUBLE_EQ(s.vy, 0.0);
}

TEST(ApplyAction, MaintainKeepIsNeutral) {
    VehicleState s = at(0, 3.7, 30);
    s = apply_action(s, kMaintainKeep, cfg());
    EXPECT_DOUBLE_EQ(s.ax, 0.0);
    EXPECT_DOUBLE_EQ(s.vy, 0.0);
    EXPECT_DOUBLE_EQ(s.y, 3.7);
}

TEST(ApplyAction, LaneChangeLatchesForTwentySteps) {
    SimConfig c = cfg();
    VehicleState s = at(0, 3.7, 30);
    s = apply_action(s, *Action::from_parts(LongCmd::Maintain, LatCmd::Left), c);
    ASSERT_TRUE(s.lane_change.has_value());
    EXPECT_EQ(s.lane_change->target_lane, 2);
    int steps = 1;
    while (s.lane_change && steps < 100) {
        s = apply_action(s, kMaintainKeep, c);  // lateral commands ignored mid-maneuver
        ++steps;
    }
    EXPECT_EQ(steps, 20);  // ceil(T_lc / dt)
    EXPECT_DOUBLE_EQ(s.y, 7.4);
}

TEST(ApplyAction, OffRoadLaneChangeRejected) {
    VehicleState s = at(0, 7.4, 30);  // leftmost lane
    bool rejected = false;
    s = apply_action(s, *Action::from_parts(LongCmd::Maintain, LatCmd::Left), cfg(), &rejected);
    EXPECT_TRUE(rejected);
    EXPECT_FALSE(s.lane_change.has_value());
    EXPECT_DOUBLE_EQ(s.y, 7.4);
    EXPECT_DOUBLE_EQ(s.ax, 0.0);  // longitudinal component kept
}

TEST(ApplyAction, LateralIgnoredWhileLatched) {
    SimConfig c = cfg();
    VehicleState s = at(0, 0, 30);
    s = apply_action(s, *Action::from_parts(LongCmd::Maintain, LatCmd::Left), c);
    ASSERT_TRUE(s.lane_change.has_value());
    int target = s.lane_change->target_lane;
    s = apply_action(s, *Action::from_parts(LongCmd::Maintain, LatCmd::Left), c);
    ASSERT_TRUE(s.lane_change.has_value());
    EXPECT_EQ(s.lane_change->target_lane, target);  // no re-latch toward lane 2
}

TEST(DetectCollision, IdenticalPoses) {
    EXPECT_TRUE(detect_collision(at(0, 0, 0), at(0, 0, 0), cfg()));
}

TEST(DetectCollision, TenMetersApart) {
    EXPECT_FALSE(detect_collision(at(0, 0, 0), at(10, 0, 0), cfg()));
}

TEST(DetectCollision, ExactCarLengthIsNoCollision) {
    EXPECT_FALSE(detect_collision(at(0, 0, 0), at(5, 0, 0), cfg()));
    EXPECT_TRUE(detect_collision(at(0, 0, 0), at(4.999, 0, 0), cfg()));
}

TEST(DetectCollision, Symmetric) {
    Rng rng = make_rng(7);
    SimConfig c = cfg();
    for (int i = 0; i < 1000; ++i) {
        auto a = at(uniform_real(rng, -8, 8), uniform_real(rng, -2, 9), 0);
        auto b = at(uniform_real(rng, -8, 8), uniform_real(rng, -2, 9), 0);
        EXPECT_EQ(detect_collision(a, b, c), detect_collision(b, a, c));
    }
}

TEST(SpawnEpisode, EmptyRange) {
    SimConfig c = cfg();
    c.traffic_min = 0;
    c.traffic_max = 0;
    WorldState w = spawn_episode(c, 1);
    EXPECT_TRUE(w.traffic.empty());
    EXPECT_DOUBLE_EQ(w.ego.y, 3.7);
    EXPECT_DOUBLE_EQ(w.ego.vx, c.ego_initial_speed);
}

TEST(SpawnEpisode, SixVehiclesCollisionFree) {
    SimConfig c = cfg();
    c.traffic_min = 6;
    c.traffic_max = 6;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        WorldState w = spawn_episode(c, seed);
        ASSERT_EQ(w.traffic.size(), 6u);
        for (std::size_t i = 0; i < w.traffic.size(); ++i) {
            EXPECT_FALSE(detect_collision(w.traffic[i].state, w.ego, c));
            for (std::size_t j = i + 1; j < w.traffic.size(); ++j)
                EXPECT_FALSE(detect_collision(w.traffic[i].state, w.traffic[j].state, c));
        }
    }
}

TEST(SpawnEpisode, DeterministicForSeed) {
    SimConfig c = cfg();
    WorldState a = spawn_episode(c, 99);
    WorldState b = spawn_episode(c, 99);
    ASSERT_EQ(a.traffic.size(), b.traffic.size());
    EXPECT_EQ(a.ego.x, b.ego.x);
    for (std::size_t i = 0; i < a.traffic.size(); ++i) {
        EXPECT_EQ(a.traffic[i].state.x, b.traffic[i].state.x);
        EXPECT_EQ(a.traffic[i].state.y, b.traffic[i].state.y);
        EXPECT_EQ(a.traffic[i].desired_speed, b.traffic[i].desired_speed);
    }
}

TEST(TrafficPolicy, FreeRoadAccelerates) {
    SimConfig c = cfg();
    WorldState w = spawn_episode([&] { auto cc = c; cc.traffic_min = cc.traffic_max = 0; return cc; }(), 3);
    TrafficVehicle tv;
    tv.state = at(0, 0, 25);  // rightmost lane, ego is in center lane far enough
    tv.desired_speed = 30;
    w.ego.x = 200;  // out of sensing range
    w.traffic.push_back(tv);
    Rng rng = make_rng(1);
    Action a = traffic_policy(w, 0, c, rng);
    EXPECT_EQ(a.longitudinal(), LongCmd::Accelerate);
}

TEST(TrafficPolicy, CloseLeadTriggersItsLadder) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    WorldState w = spawn_episode(c, 3);
    w.ego.x = 500;  // far away
    TrafficVehicle self;
    self.state = at(0, 0, 30);
    self.desired_speed = 30;
    TrafficVehicle lead;
    lead.state = at(8, 0, 25);  // 8 m gap, closing at 5 -> TTC 1.6 s
    lead.desired_speed = 25;
    w.traffic.push_back(self);
    w.traffic.push_back(lead);
    Rng rng = make_rng(1);
    Action a = traffic_policy(w, 0, c, rng);
    // traffic ladder: t_hb = 1.5 < 1.6 <= t_b = 3 -> brake
    EXPECT_EQ(a.longitudinal(), LongCmd::Brake);
    EXPECT_EQ(a.lateral(), LatCmd::Keep);
}

TEST(TrafficPolicy, UnsafeTargetGapDropsLaneChange) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    c.p_lane_change = 1e9;  // always propose
    WorldState w = spawn_episode(c, 3);
    w.ego.x = 500;
    TrafficVehicle self;
    self.state = at(0, 0, 30);  // rightmost lane: only left change possible
    self.desired_speed = 30;
    TrafficVehicle blocker;
    blocker.state = at(2, 3.7, 30);  // 2 m ahead in the target lane
    blocker.desired_speed = 30;
    w.traffic.push_back(self);
    w.traffic.push_back(blocker);
    Rng rng = make_rng(1);
    Action a = traffic_policy(w, 0, c, rng);
    EXPECT_EQ(a.lateral(), LatCmd::Keep);
}

TEST(TrafficPolicy, SafeGapAllowsProposedChange) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    c.p_lane_change = 1e9;
    WorldState w = spawn_episode(c, 3);
    w.ego.x = 500;
    TrafficVehicle self;
    self.state = at(0, 0, 30);
    self.desired_speed = 30;
    w.traffic.push_back(self);
    Rng rng = make_rng(1);
    Action a = traffic_policy(w, 0, c, rng);
    EXPECT_EQ(a.lateral(), LatCmd::Left);  // empty target lane
}

TEST(StepWorld, EgoAloneAdvancesLinearly) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    WorldState w = spawn_episode(c, 5);
    StepEvents ev = step_world(w, kMaintainKeep, c);
    EXPECT_FALSE(ev.collided);
    EXPECT_FALSE(ev.episode_done);
    EXPECT_DOUBLE_EQ(w.ego.x, c.ego_initial_speed * c.dt);
    EXPECT_EQ(w.t, 1);
}

TEST(StepWorld, RearEndCollisionEndsEpisode) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    WorldState w = spawn_episode(c, 5);
    TrafficVehicle lead;
    lead.state = at(w.ego.x + 1.0, w.ego.y, w.ego.vx);
    lead.desired_speed = lead.state.vx;
    w.traffic.push_back(lead);
    StepEvents ev = step_world(w, kMaintainKeep, c);
    EXPECT_TRUE(ev.collided);
    EXPECT_TRUE(ev.episode_done);
    EXPECT_TRUE(w.done);
}

TEST(StepWorld, TimeLimitEndsEpisode) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    WorldState w = spawn_episode(c, 5);
    w.t = c.episode_steps - 1;
    StepEvents ev = step_world(w, kMaintainKeep, c);
    EXPECT_TRUE(ev.episode_done);
    EXPECT_FALSE(ev.collided);
    EXPECT_THROW(step_world(w, kMaintainKeep, c), std::logic_error);
}

TEST(StepWorld, DeterministicTrajectories) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 5;
    WorldState a = spawn_episode(c, 11);
    WorldState b = spawn_episode(c, 11);
    for (int t = 0; t < 150 && !a.done; ++t) {
        Action act(t % Action::kCount);
        StepEvents ea = step_world(a, act, c);
        StepEvents eb = step_world(b, act, c);
        ASSERT_EQ(ea.collided, eb.collided);
        ASSERT_EQ(a.ego.x, b.ego.x);
        for (std::size_t i = 0; i < a.traffic.size(); ++i) {
            ASSERT_EQ(a.traffic[i].state.x, b.traffic[i].state.x);
            ASSERT_EQ(a.traffic[i].state.y, b.traffic[i].state.y);
            ASSERT_EQ(a.traffic[i].state.vx, b.traffic[i].state.vx);
        }
        if (a.done) break;
    }
}

TEST(StepWorld, ConstantVelocityExactOverThousandSteps) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    c.episode_steps = 2000;
    WorldState w = spawn_episode(c, 5);
    double v = w.ego.vx;
    for (int t = 1; t <= 1000; ++t) {
        step_world(w, kMaintainKeep, c);
        ASSERT_EQ(w.ego.vx, v);
        ASSERT_EQ(w.ego.x, v * c.dt * t);  // exact: repeated addition of the same summand
    }
}

TEST(StepWorld, TrafficStaysInBoundsAndUnderCaps) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 6;
    c.p_lane_change = 2.0;  // stress lane changing
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        WorldState w = spawn_episode(c, seed);
        while (!w.done) {
            step_world(w, kMaintainKeep, c);
            for (const auto& tv : w.traffic) {
                ASSERT_GE(tv.state.y, c.road_y_min());
                ASSERT_LE(tv.state.y, c.road_y_max());
                ASSERT_LE(tv.state.vx, tv.desired_speed + 1e-12);
            }
        }
    }
}

TEST(StepWorld, LaneChangeEndsExactlyOnCenter) {
    SimConfig c = cfg();
    c.traffic_min = c.traffic_max = 0;
    WorldState w = spawn_episode(c, 5);
    step_world(w, *Action::from_parts(LongCmd::Maintain, LatCmd::Right), c);
    while (w.ego.lane_change && !w.done) step_world(w, kMaintainKeep, c);
    EXPECT_DOUBLE_EQ(w.ego.y, 0.0);
    EXPECT_DOUBLE_EQ(w.ego.vy, 0.0);
}
