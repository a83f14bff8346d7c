#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>

#include "graspsim/gcode.hpp"
#include "graspsim/geometry.hpp"

namespace graspsim::plant {

/// World geometry. All lengths in mm, speeds in mm/s. The end-effector
/// point is the midpoint between the fingertips; fingers extend upward
/// from it by `finger_length` and close along world x.
struct PlantConfig {
    double cube_side{30.0};
    double platform_top_z{0.0};
    double home_height{500.0};
    double finger_gap_open{100.0};
    double finger_length{50.0};
    double finger_thickness{15.0};
    double finger_width{20.0};
    std::optional<double> grasp_height_z;  // fingertip height for the grasp; cube_side / 2 if unset
    double close_speed{200.0};
    double vmax_axis{300.0};
    // Per-axis ee acceleration bound (mm/s^2); infinity tracks commands exactly.
    double accel_max{2000.0};
    double descent_speed{75.0};
    double push_limit{20.0};
    double overlap_min{0.3};  // fraction of cube_side
    double platform_half{130.0};
    double lift_height{100.0};

    double grasp_height() const { return grasp_height_z.value_or(0.5 * cube_side); }

    // Nominal closure time for a stationary cube: descent plus finger travel.
    double nominal_grasp_time() const {
        return (home_height - grasp_height()) / descent_speed +
               (finger_gap_open - cube_side) / close_speed;
    }

    void validate() const;
};

enum class ObjectStatus { OnPlatform, Grasped, Knocked, OffPlatform };
enum class GripperMode { Open, Closing, Closed };

std::string to_string(ObjectStatus s);
std::string to_string(GripperMode m);

struct PlantState {
    double t{0.0};
    Vec2 platform_pos{Vec2::Zero()};
    Vec3 object_center{Vec3::Zero()};
    ObjectStatus object_status{ObjectStatus::OnPlatform};
    Vec3 ee_pos{Vec3::Zero()};
    Vec3 ee_vel{Vec3::Zero()};
    double gripper_gap{0.0};
    GripperMode gripper_mode{GripperMode::Open};

    // Cube position relative to the platform centre. Zero until a finger
    // pushes the cube across the platform surface.
    Vec2 object_offset{Vec2::Zero()};
    // Cube centre minus ee while Grasped.
    Vec3 grasp_offset{Vec3::Zero()};
    bool closed_this_step{false};
};

struct ControlAction {
    Vec3 v{Vec3::Zero()};  // mm/s
    bool close{false};
};

struct Box {
    Vec3 lo;
    Vec3 hi;
};

enum class ClosureOutcome { Grasped, Knocked };

PlantState init(const PlantConfig& config, const gcode::MotionTimeline& timeline);

/// Advances the world by dt: platform from the timeline, ee by the clamped
/// velocity, gripper closure, then quasi-static finger/cube contact.
PlantState step(const PlantState& state, const ControlAction& action,
                const gcode::MotionTimeline& timeline, double dt, const PlantConfig& config);

/// Evaluated on the state in which the gripper reached Closed.
ClosureOutcome classify_closure(const PlantState& state, const PlantConfig& config);

/// Left and right finger volumes at the state's ee position and gap.
std::array<Box, 2> finger_boxes(const Vec3& ee_pos, double gap, const PlantConfig& config);

Box cube_box(const Vec3& center, double side);

}  // namespace graspsim::plant
