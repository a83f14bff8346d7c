#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "graspsim/control.hpp"
#include "graspsim/error.hpp"
#include "graspsim/rng.hpp"

using namespace graspsim;
using namespace graspsim::control;

namespace {

percept::Observation seen(const std::string& id, Vec2 c, double area, double t = 0.0) {
    return {id, true, c, area, t};
}

percept::Observation unseen(const std::string& id, double t = 0.0) { return {id, false, {}, {}, t}; }

const std::vector<CameraGoal> kGoals{{"a", Vec2::Zero(), 0.0}, {"b", Vec2::Zero(), 0.0}};

// One frame from a fresh state with the error e = goal - centroid.
Step frame_with_error(Vec2 e, double ee_z = 400.0) {
    const std::vector<percept::Observation> obs{seen("a", -e, 0.05)};
    return compute_action({}, obs, kGoals, {}, ee_z, 15.0);
}

}  // namespace

TEST(Control, ZeroErrorDescendsAndCloses) {
    const auto s = frame_with_error(Vec2::Zero());
    EXPECT_EQ(s.action.v, Vec3(0.0, 0.0, -75.0));
    EXPECT_TRUE(s.action.close);
    EXPECT_EQ(s.selected, "a");
}

TEST(Control, ProportionalTerm) {
    // kp = 0.3 m/s per unit error: e_x = 0.1 gives 0.03 m/s before the image
    // to workspace mapping (yaw 0 flips the sign).
    const auto s = frame_with_error(Vec2(0.1, 0.0));
    EXPECT_NEAR(s.action.v.x(), -30.0, 1e-12);
    EXPECT_NEAR(s.action.v.y(), 0.0, 1e-12);
}

TEST(Control, LinearBelowClamp) {
    Rng rng(3);
    for (int k = 0; k < 500; ++k) {
        const Vec2 e(rng.uniform(-0.99, 0.99), rng.uniform(-0.99, 0.99));
        const auto s = frame_with_error(e);
        const Vec2 expected = image_to_workspace(0.3 * e * 1000.0, 0.0);
        EXPECT_NEAR(s.action.v.x(), expected.x(), 1e-9);
        EXPECT_NEAR(s.action.v.y(), expected.y(), 1e-9);
    }
}

TEST(Control, ClampAt300) {
    Rng rng(4);
    for (int k = 0; k < 500; ++k) {
        const Vec2 e(rng.uniform(-1, 1), rng.uniform(-1, 1));
        // Large centroid rate so the derivative term saturates the command.
        std::vector<percept::Observation> first{seen("a", -e, 0.05, 0.0)};
        const auto s0 = compute_action({}, first, kGoals, {}, 400.0, 15.0);
        std::vector<percept::Observation> second{seen("a", -e * rng.uniform(-30, 30), 0.05, 0.04)};
        const auto s1 = compute_action(s0.state, second, kGoals, {}, 400.0, 15.0);
        EXPECT_LE(std::abs(s1.action.v.x()), 300.0 + 1e-9);
        EXPECT_LE(std::abs(s1.action.v.y()), 300.0 + 1e-9);
    }
    const auto big = frame_with_error(Vec2(5.0, -5.0));
    EXPECT_DOUBLE_EQ(std::abs(big.action.v.x()), 300.0);
    EXPECT_DOUBLE_EQ(std::abs(big.action.v.y()), 300.0);
}

TEST(Control, DescentStopsAtGraspHeight) {
    EXPECT_EQ(frame_with_error(Vec2::Zero(), 15.0001).action.v.z(), -75.0);
    EXPECT_EQ(frame_with_error(Vec2::Zero(), 15.0).action.v.z(), 0.0);
    EXPECT_EQ(frame_with_error(Vec2::Zero(), 3.0).action.v.z(), 0.0);
}

TEST(Control, CloseBoxExamples) {
    EXPECT_FALSE(frame_with_error(Vec2(0.5, 0.2)).action.close);
    EXPECT_TRUE(frame_with_error(Vec2(0.5, 0.1)).action.close);
}

TEST(Control, CloseBoxThresholds) {
    const double eps = 1e-9;
    for (double sx : {-1.0, 1.0}) {
        EXPECT_TRUE(frame_with_error(Vec2(sx * (0.8 - eps), 0.0)).action.close);
        EXPECT_FALSE(frame_with_error(Vec2(sx * (0.8 + eps), 0.0)).action.close);
        EXPECT_FALSE(frame_with_error(Vec2(sx * 0.8, 0.0)).action.close);
    }
    for (double sy : {-1.0, 1.0}) {
        EXPECT_TRUE(frame_with_error(Vec2(0.0, sy * (0.15 - eps))).action.close);
        EXPECT_FALSE(frame_with_error(Vec2(0.0, sy * (0.15 + eps))).action.close);
        EXPECT_FALSE(frame_with_error(Vec2(0.0, sy * 0.15)).action.close);
    }
}

TEST(Control, CloseIffStrictlyInsideBox) {
    Rng rng(8);
    for (int k = 0; k < 2000; ++k) {
        const Vec2 e(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3));
        const bool inside = std::abs(e.x()) < 0.8 && std::abs(e.y()) < 0.15;
        EXPECT_EQ(frame_with_error(e).action.close, inside) << e.transpose();
    }
}

TEST(Control, LargerAreaCameraDrives) {
    const std::vector<percept::Observation> obs{seen("a", Vec2(0.4, 0.0), 0.02), seen("b", Vec2(-0.2, 0.0), 0.05)};
    const auto s = compute_action({}, obs, kGoals, {}, 400.0, 15.0);
    EXPECT_EQ(s.selected, "b");
    ASSERT_TRUE(s.error);
    EXPECT_DOUBLE_EQ(s.error->e.x(), 0.2);
    EXPECT_NEAR(s.action.v.x(), -0.3 * 0.2 * 1000.0, 1e-12);
}

TEST(Control, ArbitrationInvariantToScaling) {
    Rng rng(12);
    for (int k = 0; k < 500; ++k) {
        const double a1 = rng.uniform(1e-5, 0.5), a2 = rng.uniform(1e-5, 0.5);
        if (a1 == a2) continue;
        const double scale = rng.uniform(0.01, 2.0);
        const std::vector<percept::Observation> base{seen("a", Vec2(0.1, 0), a1), seen("b", Vec2(-0.1, 0), a2)};
        const std::vector<percept::Observation> scaled{seen("a", Vec2(0.1, 0), a1 * scale),
                                                       seen("b", Vec2(-0.1, 0), a2 * scale)};
        EXPECT_EQ(compute_action({}, base, kGoals, {}, 400, 15).selected,
                  compute_action({}, scaled, kGoals, {}, 400, 15).selected);
    }
}

TEST(Control, DerivativeOfMovingCentroid) {
    const Vec2 r(0.7, -0.25);  // image units per second
    ControllerState state;
    Step s;
    for (int k = 0; k < 5; ++k) {
        const double t = 0.04 * k;
        const std::vector<percept::Observation> obs{seen("a", Vec2(-0.3, 0.1) + r * t, 0.05, t)};
        s = compute_action(state, obs, kGoals, {}, 400.0, 15.0);
        state = s.state;
        ASSERT_TRUE(s.error);
        if (k == 0) {
            EXPECT_EQ(s.error->e_dot, Vec2::Zero());
        } else {
            EXPECT_NEAR(s.error->e_dot.x(), -r.x(), 1e-9);
            EXPECT_NEAR(s.error->e_dot.y(), -r.y(), 1e-9);
        }
    }
}

TEST(Control, DerivativeRestartsAfterLoss) {
    std::vector<percept::Observation> obs{seen("a", Vec2(0.1, 0.0), 0.05, 0.0)};
    auto s = compute_action({}, obs, kGoals, {}, 400.0, 15.0);
    obs = {unseen("a", 0.04)};
    s = compute_action(s.state, obs, kGoals, {}, 400.0, 15.0);
    EXPECT_EQ(s.action.v, Vec3::Zero());
    EXPECT_FALSE(s.action.close);
    EXPECT_FALSE(s.selected);
    obs = {seen("a", Vec2(0.5, 0.0), 0.05, 0.08)};
    s = compute_action(s.state, obs, kGoals, {}, 400.0, 15.0);
    EXPECT_EQ(s.error->e_dot, Vec2::Zero());
}

TEST(Control, YawRotatesCommand) {
    const std::vector<CameraGoal> goals{{"a", Vec2::Zero(), kPi / 2.0}};
    const std::vector<percept::Observation> obs{seen("a", Vec2(-0.1, 0.0), 0.05)};
    const auto s = compute_action({}, obs, goals, {}, 400.0, 15.0);
    // Image +u points along workspace +y for a camera yawed 90 degrees.
    EXPECT_NEAR(s.action.v.x(), 0.0, 1e-12);
    EXPECT_NEAR(s.action.v.y(), -30.0, 1e-12);
}

TEST(Control, StatelessAcrossResets) {
    Rng rng(21);
    std::vector<std::vector<percept::Observation>> stream;
    for (int k = 0; k < 60; ++k) {
        const double t = 0.04 * k;
        std::vector<percept::Observation> frame;
        for (const char* id : {"a", "b"}) {
            if (rng.uniform() < 0.2) frame.push_back(unseen(id, t));
            else frame.push_back(seen(id, Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(0, 0.2), t));
        }
        stream.push_back(frame);
    }
    auto run = [&] {
        std::vector<plant::ControlAction> out;
        ControllerState state;
        for (const auto& f : stream) {
            auto s = compute_action(state, f, kGoals, {}, 300.0, 15.0);
            state = s.state;
            out.push_back(s.action);
        }
        return out;
    };
    const auto a = run();
    const auto b = run();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].v, b[i].v);
        EXPECT_EQ(a[i].close, b[i].close);
    }
}

TEST(Control, UnknownCameraIsAnError) {
    const std::vector<percept::Observation> obs{seen("ghost", Vec2::Zero(), 0.05)};
    EXPECT_THROW(compute_action({}, obs, kGoals, {}, 400.0, 15.0), ConfigError);
}
