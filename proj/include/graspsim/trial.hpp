#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "graspsim/control.hpp"
#include "graspsim/gcode.hpp"
#include "graspsim/percept.hpp"
#include "graspsim/plant.hpp"
#include "graspsim/traj.hpp"

namespace graspsim::trial {

struct TrialConfig {
    traj::Trajectory trajectory;
    double speed{100.0};  // mm/s
    plant::PlantConfig plant;
    percept::PerceptionConfig perception;
    control::ControllerConfig controller;
    gcode::PlannerConfig planner;
    std::size_t loss_frames{12};
    double max_duration{30.0};  // s
    // Test hook: with false every camera reports the object unseen.
    bool object_present{true};

    void validate() const;
};

enum class Outcome { Success, GraspFailure, PerceptionFailure, Timeout };

std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct TraceRow {
    double t;
    Vec2 platform;
    Vec3 object;
    Vec3 ee;
    double gripper_gap;
    plant::GripperMode mode;
    bool seen;
};

struct TrialResult {
    Outcome outcome{Outcome::Timeout};
    std::optional<double> grasp_time;  // s, Success only
    std::size_t frames{0};             // controller frames until the trial was decided
    std::optional<double> lifted_object_z;
    std::vector<TraceRow> trace;       // filled when requested
};

/// Home, start platform and controller together, servo until the fingers
/// close, lift, classify.
TrialResult run_trial(const TrialConfig& config, bool record_trace = false);

/// Trace as CSV: t,platform_x,platform_y,object_x,object_y,object_z,ee_x,ee_y,ee_z,gripper_gap,mode,seen
std::string trace_csv(const std::vector<TraceRow>& trace);

}  // namespace graspsim::trial
