#include "graspsim/trial.hpp"

#include <cmath>

#include <fmt/format.h>

#include "graspsim/error.hpp"

namespace graspsim::trial {

void TrialConfig::validate() const {
    if (!(speed > 0.0 && speed <= traj::kPlatformSpeedLimit)) {
        throw ConfigError(fmt::format("trial speed {} mm/s outside (0, {}]", speed, traj::kPlatformSpeedLimit));
    }
    if (loss_frames < 1) throw ConfigError("trial.loss_frames must be >= 1");
    if (!(max_duration > 0.0)) throw ConfigError("trial.max_duration must be > 0");
    plant.validate();
    perception.validate();
    controller.validate();
    planner.validate();
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Success: return "success";
        case Outcome::GraspFailure: return "grasp_failure";
        case Outcome::PerceptionFailure: return "perception_failure";
        case Outcome::Timeout: return "timeout";
    }
    return "?";
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "success") return Outcome::Success;
    if (s == "grasp_failure") return Outcome::GraspFailure;
    if (s == "perception_failure") return Outcome::PerceptionFailure;
    if (s == "timeout") return Outcome::Timeout;
    throw ConfigError(fmt::format("unknown outcome '{}'", s));
}

namespace {

void record(std::vector<TraceRow>& trace, const plant::PlantState& s, bool seen) {
    trace.push_back({s.t, s.platform_pos, s.object_center, s.ee_pos, s.gripper_gap, s.gripper_mode, seen});
}

}  // namespace

TrialResult run_trial(const TrialConfig& config, bool record_trace) {
    config.validate();
    const auto& pc = config.plant;
    const double dt = config.controller.dt();
    const double grasp_height = pc.platform_top_z + pc.grasp_height();

    const auto timeline =
        gcode::plan(gcode::parse(traj::emit_gcode(config.trajectory, config.speed)), config.planner);

    std::vector<control::CameraGoal> goals;
    for (const auto& cam : config.perception.cameras) {
        goals.push_back({cam.id, percept::desired_point(cam, pc), cam.yaw()});
    }

    TrialResult result;
    plant::PlantState state = plant::init(pc, timeline);
    control::ControllerState ctrl;
    std::size_t unseen = 0;
    const auto max_frames = static_cast<std::size_t>(std::ceil(config.max_duration * config.controller.rate));

    std::vector<percept::Observation> observations;
    observations.reserve(goals.size());

    for (std::size_t frame = 0;; ++frame) {
        if (frame >= max_frames) {
            result.outcome = Outcome::Timeout;
            result.frames = frame;
            return result;
        }

        observations.clear();
        bool seen = false;
        for (const auto& cam : config.perception.cameras) {
            auto obs = percept::observe(cam, state, pc);
            if (!config.object_present) obs = percept::Observation{cam.id, false, {}, {}, state.t};
            seen = seen || obs.visible;
            observations.push_back(std::move(obs));
        }
        if (record_trace) record(result.trace, state, seen);

        unseen = seen ? 0 : unseen + 1;
        if (unseen >= config.loss_frames) {
            result.outcome = Outcome::PerceptionFailure;
            result.frames = frame + 1;
            return result;
        }

        auto step = control::compute_action(ctrl, observations, goals, config.controller,
                                            state.ee_pos.z(), grasp_height);
        ctrl = std::move(step.state);
        // Closing is armed once the descent has reached grasp height.
        step.action.close = step.action.close && state.ee_pos.z() <= grasp_height;

        state = plant::step(state, step.action, timeline, dt, pc);

        if (state.object_status == plant::ObjectStatus::OffPlatform) {
            if (record_trace) record(result.trace, state, seen);
            result.outcome = Outcome::GraspFailure;
            result.frames = frame + 1;
            return result;
        }
        if (state.closed_this_step) {
            result.frames = frame + 1;
            if (state.object_status != plant::ObjectStatus::Grasped) {
                if (record_trace) record(result.trace, state, seen);
                result.outcome = Outcome::GraspFailure;
                return result;
            }
            result.grasp_time = static_cast<double>(frame + 1) / config.controller.rate;
            break;
        }
    }

    // Lift at the axis speed limit, last tick trimmed to land on lift_height.
    const double target_z = state.ee_pos.z() + pc.lift_height;
    while (state.ee_pos.z() < target_z) {
        const double remaining = target_z - state.ee_pos.z();
        plant::ControlAction lift;
        lift.v = Vec3(0.0, 0.0, std::min(pc.vmax_axis, remaining / dt));
        state = plant::step(state, lift, timeline, dt, pc);
        if (record_trace) record(result.trace, state, true);
        if (remaining <= pc.vmax_axis * dt) break;
    }
    result.lifted_object_z = state.object_center.z();
    result.outcome = state.object_status == plant::ObjectStatus::Grasped ? Outcome::Success
                                                                          : Outcome::GraspFailure;
    if (result.outcome != Outcome::Success) result.grasp_time.reset();
    return result;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out =
        "t,platform_x,platform_y,object_x,object_y,object_z,ee_x,ee_y,ee_z,gripper_gap,mode,seen\n";
    for (const auto& r : trace) {
        out += fmt::format("{:.4f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", r.t,
                           r.platform.x(), r.platform.y(), r.object.x(), r.object.y(), r.object.z(),
                           r.ee.x(), r.ee.y(), r.ee.z(), r.gripper_gap, plant::to_string(r.mode),
                           r.seen ? 1 : 0);
    }
    return out;
}

}  // namespace graspsim::trial
