#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "graspsim/geometry.hpp"
#include "graspsim/percept.hpp"
#include "graspsim/plant.hpp"

namespace graspsim::control {

/// Gains act on normalized image error and produce velocities in m/s.
struct ControllerConfig {
    double kp{0.3};
    double kd{0.06};
    double vmax{0.3};      // m/s, per axis
    double descent{0.075};  // m/s
    double close_ex{0.8};
    double close_ey{0.15};
    double rate{25.0};  // Hz

    double dt() const { return 1.0 / rate; }
    void validate() const;
};

struct CentroidSample {
    Vec2 centroid;
    double t{0.0};
};

struct ControllerState {
    // Only cameras that saw the object on their latest frame have an entry.
    std::map<std::string, CentroidSample> previous;
    std::optional<std::string> last_selected;
};

struct ImageError {
    Vec2 e{Vec2::Zero()};
    Vec2 e_dot{Vec2::Zero()};
};

/// Per-camera target: the goal image point and the camera's yaw about the
/// descent axis, which maps image axes onto the workspace.
struct CameraGoal {
    std::string camera_id;
    Vec2 goal{Vec2::Zero()};
    double yaw{0.0};
};

struct Step {
    plant::ControlAction action;
    ControllerState state;
    std::optional<std::string> selected;
    std::optional<ImageError> error;
};

/// One controller frame. Each visible camera gets e = goal - centroid and a
/// finite-difference e_dot (zero on first sight); the camera with the larger
/// image area drives a clamped PD lateral command; the hand descends while
/// above `grasp_height`; close fires inside the (close_ex, close_ey) box.
/// With no camera seeing the object the hand holds still and does not close.
Step compute_action(const ControllerState& state, std::span<const percept::Observation> observations,
                    std::span<const CameraGoal> goals, const ControllerConfig& config, double ee_z,
                    double grasp_height);

/// Maps an image-plane command (u, v) to workspace (x, y) velocity for a
/// camera with the given yaw. Moving the camera along +x shifts the image of
/// a fixed point toward -u, hence the sign flip.
Vec2 image_to_workspace(const Vec2& command, double yaw);

}  // namespace graspsim::control
