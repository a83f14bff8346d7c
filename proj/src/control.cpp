#include "graspsim/control.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "graspsim/error.hpp"

namespace graspsim::control {

void ControllerConfig::validate() const {
    if (!(kp > 0.0 && kd > 0.0 && vmax > 0.0 && descent > 0.0 && close_ex > 0.0 && close_ey > 0.0 &&
          rate > 0.0)) {
        throw ConfigError("controller gains, speeds, thresholds and rate must be > 0");
    }
    if (!(close_ex < 1.0 && close_ey < 1.0)) throw ConfigError("controller close thresholds must be < 1");
}

Vec2 image_to_workspace(const Vec2& command, double yaw) {
    const Vec2 u_axis(std::cos(yaw), std::sin(yaw));
    const Vec2 v_axis(std::sin(yaw), -std::cos(yaw));
    return -(command.x() * u_axis + command.y() * v_axis);
}

Step compute_action(const ControllerState& state, std::span<const percept::Observation> observations,
                    std::span<const CameraGoal> goals, const ControllerConfig& config, double ee_z,
                    double grasp_height) {
    Step out;
    out.state.last_selected = state.last_selected;

    const percept::Observation* best = nullptr;
    const CameraGoal* best_goal = nullptr;
    ImageError best_error;

    for (const auto& obs : observations) {
        if (!obs.visible) continue;
        const auto g = std::find_if(goals.begin(), goals.end(),
                                    [&](const CameraGoal& cg) { return cg.camera_id == obs.camera_id; });
        if (g == goals.end()) {
            throw ConfigError(fmt::format("no goal configured for camera '{}'", obs.camera_id));
        }
        ImageError err;
        err.e = g->goal - *obs.centroid;
        if (auto prev = state.previous.find(obs.camera_id); prev != state.previous.end()) {
            const double dt = obs.t - prev->second.t;
            if (dt > 0.0) err.e_dot = ((g->goal - *obs.centroid) - (g->goal - prev->second.centroid)) / dt;
        }
        out.state.previous[obs.camera_id] = {*obs.centroid, obs.t};

        if (best == nullptr || *obs.area > *best->area) {
            best = &obs;
            best_goal = &*g;
            best_error = err;
        }
    }

    if (best == nullptr) {
        out.action = {};
        return out;
    }

    const double vmax_mm = config.vmax * 1000.0;
    const Vec2 image_cmd = (config.kp * best_error.e + config.kd * best_error.e_dot) * 1000.0;
    const Vec2 clamped = image_cmd.cwiseMax(-vmax_mm).cwiseMin(vmax_mm);
    const Vec2 lateral = image_to_workspace(clamped, best_goal->yaw).cwiseMax(-vmax_mm).cwiseMin(vmax_mm);

    out.action.v = Vec3(lateral.x(), lateral.y(), ee_z > grasp_height ? -config.descent * 1000.0 : 0.0);
    out.action.close = std::abs(best_error.e.x()) < config.close_ex &&
                       std::abs(best_error.e.y()) < config.close_ey;
    out.selected = best->camera_id;
    out.state.last_selected = best->camera_id;
    out.error = best_error;
    return out;
}

}  // namespace graspsim::control
