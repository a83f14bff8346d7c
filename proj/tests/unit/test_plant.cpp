#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>

#include "graspsim/error.hpp"
#include "graspsim/plant.hpp"
#include "graspsim/rng.hpp"
#include "oracles.hpp"

using namespace graspsim;
using namespace graspsim::plant;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

gcode::MotionTimeline still() { return gcode::plan(gcode::parse("G21\nG90\n"), {}); }

gcode::MotionTimeline moving(std::uint64_t seed, double speed) {
    traj::TrajectoryParams p;
    p.seed = seed;
    return gcode::plan(gcode::parse(traj::emit_gcode(traj::generate(p), speed)), {});
}

// Fingertips at grasp height with the cube offset by (dx, dy) from the jaw centre.
PlantState at_grasp(const PlantConfig& c, double dx, double dy) {
    auto s = init(c, still());
    s.ee_pos = Vec3(-dx, -dy, c.grasp_height());
    return s;
}

PlantState close_fully(PlantState s, const PlantConfig& c) {
    ControlAction close;
    close.close = true;
    const auto tl = still();
    for (int k = 0; k < 100 && s.gripper_mode != GripperMode::Closed; ++k) s = step(s, close, tl, 0.04, c);
    return s;
}

// Horizontal travel of each finger relative to the platform over one step:
// ee motion minus platform motion, plus the inner face closing in.
std::array<double, 2> finger_travel(const PlantState& prev, const PlantState& s) {
    const Vec2 rel = (s.ee_pos - prev.ee_pos).head<2>() - (s.platform_pos - prev.platform_pos);
    const double close = 0.5 * (prev.gripper_gap - s.gripper_gap);
    return {(rel + Vec2(close, 0.0)).norm(), (rel - Vec2(close, 0.0)).norm()};
}

}  // namespace

TEST(Plant, InitialState) {
    PlantConfig c;
    const auto s = init(c, still());
    EXPECT_EQ(s.ee_pos, Vec3(0.0, 0.0, 500.0));
    EXPECT_EQ(s.gripper_gap, 100.0);
    EXPECT_EQ(s.gripper_mode, GripperMode::Open);
    EXPECT_EQ(s.object_center, Vec3(0.0, 0.0, 15.0));
    c.cube_side = 40.0;
    EXPECT_EQ(init(c, still()).object_center, Vec3(0.0, 0.0, 20.0));
}

TEST(Plant, VelocityClampedPerAxis) {
    PlantConfig c;
    c.accel_max = kInf;
    const auto s0 = init(c, still());
    ControlAction a;
    a.v = Vec3(400.0, 0.0, 0.0);
    const auto s1 = step(s0, a, still(), 0.1, c);
    EXPECT_DOUBLE_EQ(s1.ee_pos.x() - s0.ee_pos.x(), 30.0);
    EXPECT_EQ(s1.ee_pos.y(), 0.0);
    EXPECT_EQ(s1.ee_pos.z(), 500.0);
}

TEST(Plant, FiniteAccelerationRamps) {
    PlantConfig c;
    c.accel_max = 2000.0;
    auto s = init(c, still());
    ControlAction a;
    a.v = Vec3(300.0, 0.0, 0.0);
    s = step(s, a, still(), 0.04, c);
    EXPECT_DOUBLE_EQ(s.ee_vel.x(), 80.0);
    EXPECT_NEAR(s.ee_pos.x(), 80.0 * 0.04, 1e-12);
}

TEST(Plant, NullDynamics) {
    PlantConfig c;
    const auto s0 = init(c, still());
    for (double dt : {0.001, 0.04, 1.0, 17.0}) {
        const auto s1 = step(s0, {}, still(), dt, c);
        EXPECT_EQ(s1.t, s0.t + dt);
        EXPECT_EQ(s1.platform_pos, s0.platform_pos);
        EXPECT_EQ(s1.object_center, s0.object_center);
        EXPECT_EQ(s1.object_status, s0.object_status);
        EXPECT_EQ(s1.ee_pos, s0.ee_pos);
        EXPECT_EQ(s1.ee_vel, s0.ee_vel);
        EXPECT_EQ(s1.gripper_gap, s0.gripper_gap);
        EXPECT_EQ(s1.gripper_mode, s0.gripper_mode);
    }
}

TEST(Plant, CentredCubeIsGrasped) {
    for (double side : {30.0, 40.0}) {
        PlantConfig c;
        c.cube_side = side;
        const auto s = close_fully(at_grasp(c, 0.0, 0.0), c);
        EXPECT_EQ(s.gripper_mode, GripperMode::Closed);
        EXPECT_EQ(s.gripper_gap, side);
        EXPECT_EQ(s.object_status, ObjectStatus::Grasped);
        EXPECT_EQ(classify_closure(s, c), ClosureOutcome::Grasped);
        // Inner finger faces touch the cube faces.
        const auto f = finger_boxes(s.ee_pos, s.gripper_gap, c);
        const auto cube = cube_box(s.object_center, side);
        EXPECT_DOUBLE_EQ(f[0].hi.x(), cube.lo.x());
        EXPECT_DOUBLE_EQ(f[1].lo.x(), cube.hi.x());
    }
}

TEST(Plant, CubeOutsideSweepIsKnocked) {
    PlantConfig c;
    const auto s = close_fully(at_grasp(c, 0.0, 40.0), c);
    EXPECT_EQ(s.gripper_mode, GripperMode::Closed);
    EXPECT_EQ(s.gripper_gap, 0.0);
    EXPECT_EQ(s.object_status, ObjectStatus::Knocked);
    EXPECT_EQ(classify_closure(s, c), ClosureOutcome::Knocked);
}

TEST(Plant, OffCentreAlongClosingAxisIsCentred) {
    PlantConfig c;
    const auto s = close_fully(at_grasp(c, 20.0, 0.0), c);
    EXPECT_EQ(s.object_status, ObjectStatus::Grasped);
    EXPECT_NEAR(s.object_center.x(), s.ee_pos.x(), 1e-12);
}

TEST(Plant, PerpendicularOffsetSweep) {
    for (double side : {30.0, 40.0}) {
        PlantConfig c;
        c.cube_side = side;
        for (double dy = 0.0; dy <= 1.2 * side; dy += 0.25) {
            const double overlap = oracle::perpendicular_overlap(dy, side, c.finger_width);
            const bool expect_grasp = overlap >= c.overlap_min * side;
            const auto s = close_fully(at_grasp(c, 0.0, dy), c);
            ASSERT_EQ(s.gripper_mode, GripperMode::Closed);
            EXPECT_EQ(s.object_status == ObjectStatus::Grasped, expect_grasp) << "side " << side << " dy " << dy;
        }
        // The named case: 0.8 side off the finger axis.
        const double dy = 0.8 * side;
        const bool expect = oracle::perpendicular_overlap(dy, side, c.finger_width) >= c.overlap_min * side;
        EXPECT_EQ(close_fully(at_grasp(c, 0.0, dy), c).object_status == ObjectStatus::Grasped, expect);
    }
}

TEST(Plant, DeepPushDropsCube) {
    PlantConfig c;
    c.accel_max = kInf;
    auto s = init(c, still());
    s.ee_pos = Vec3(57.0, 0.0, 40.0);  // left finger straddles the cube centre, 10 mm above it
    ControlAction a;
    a.v = Vec3(0.0, 0.0, -250.0);
    s = step(s, a, still(), 0.1, c);
    EXPECT_EQ(s.object_status, ObjectStatus::OffPlatform);
}

TEST(Plant, ShallowPushMovesCube) {
    PlantConfig c;
    c.accel_max = kInf;
    auto s = init(c, still());
    s.ee_pos = Vec3(-80.0, 0.0, 10.0);  // outer face of the right finger touches the cube
    ControlAction a;
    a.v = Vec3(100.0, 0.0, 0.0);
    s = step(s, a, still(), 0.1, c);  // face advances 10 mm into the cube
    EXPECT_EQ(s.object_status, ObjectStatus::OnPlatform);
    EXPECT_NEAR(s.object_offset.x(), 10.0, 1e-12);
    EXPECT_NEAR(s.object_center.x(), 10.0, 1e-12);
}

TEST(Plant, ValidatesConfig) {
    PlantConfig c;
    c.cube_side = 100.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.overlap_min = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.accel_max = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

// ─── Invariants under random actions ────────────────────────────────────────

class PlantRandom : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PlantRandom, Invariants) {
    PlantConfig c;
    c.accel_max = GetParam() % 2 ? kInf : 2000.0;
    const auto tl = moving(GetParam(), 100.0 + 10.0 * static_cast<double>(GetParam() % 10));
    Rng rng(GetParam());
    auto s = init(c, tl);
    s.ee_pos = Vec3(rng.uniform(-40, 40), rng.uniform(-40, 40), c.grasp_height() + rng.uniform(0, 20));
    const double dt = 0.04;
    const int close_at = 20 + static_cast<int>(rng.uniform(0, 60));
    bool closing_seen = false;

    for (int k = 0; k < 250; ++k) {
        ControlAction a;
        a.v = Vec3(rng.uniform(-450, 450), rng.uniform(-450, 450), rng.uniform(-30, 10));
        // Steer roughly toward the cube so contacts actually happen.
        a.v.head<2>() += 4.0 * (s.object_center - s.ee_pos).head<2>();
        a.close = k >= close_at;
        const auto prev = s;
        s = step(prev, a, tl, dt, c);

        for (int i = 0; i < 3; ++i) ASSERT_LE(std::abs(s.ee_vel[i]), c.vmax_axis + 1e-9);

        if (s.object_status == ObjectStatus::OffPlatform) break;

        if (prev.object_status == ObjectStatus::Grasped) {
            ASSERT_EQ(s.object_status, ObjectStatus::Grasped);
            const Vec3 d_obj = s.object_center - prev.object_center;
            const Vec3 d_ee = s.ee_pos - prev.ee_pos;
            ASSERT_LE((d_obj - d_ee).norm(), 1e-9);
        } else {
            ASSERT_EQ(s.object_center.head<2>(), s.platform_pos + s.object_offset);
            // The fingers start the step clear of the cube, so a push never
            // exceeds how far they reached into it: at most their travel.
            const auto travel = finger_travel(prev, s);
            const double allowed = travel[0] + travel[1];
            ASSERT_LE((s.object_offset - prev.object_offset).norm(), allowed + 1e-9) << "step " << k;
        }

        if (prev.gripper_mode != GripperMode::Open) {
            closing_seen = true;
            ASSERT_LE(s.gripper_gap, prev.gripper_gap);
        }
    }
    EXPECT_TRUE(closing_seen || s.object_status == ObjectStatus::OffPlatform);
}

TEST(PlantCoupling, TracksPlatformWithoutContact) {
    PlantConfig c;
    const auto tl = moving(3, 200.0);
    auto s = init(c, tl);
    for (int k = 0; k < 300; ++k) {
        s = step(s, {}, tl, 0.04, c);
        ASSERT_EQ(s.object_status, ObjectStatus::OnPlatform);
        ASSERT_EQ(s.object_center.head<2>(), s.platform_pos);
        ASSERT_EQ(s.platform_pos, gcode::position_at_time(tl, s.t));
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, PlantRandom, ::testing::Range<std::uint64_t>(1, 41));
