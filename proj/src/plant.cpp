#include "graspsim/plant.hpp"

#include <algorithm>
#include <cmath>

#include "graspsim/error.hpp"

namespace graspsim::plant {

void PlantConfig::validate() const {
    if (!(cube_side > 0.0 && home_height > 0.0 && finger_gap_open > 0.0 && finger_length > 0.0 &&
          finger_thickness > 0.0 && finger_width > 0.0 && close_speed > 0.0 && vmax_axis > 0.0 &&
          descent_speed > 0.0 && accel_max > 0.0 && push_limit > 0.0 && platform_half > 0.0 && lift_height > 0.0)) {
        throw ConfigError("plant dimensions and speeds must be > 0");
    }
    if (!(cube_side < finger_gap_open)) throw ConfigError("plant.cube_side must be < finger_gap_open");
    if (!(overlap_min >= 0.0 && overlap_min <= 1.0)) throw ConfigError("plant.overlap_min must be in [0, 1]");
    if (grasp_height_z && !(*grasp_height_z >= 0.0)) throw ConfigError("plant.grasp_height_z must be >= 0");
}

std::string to_string(ObjectStatus s) {
    switch (s) {
        case ObjectStatus::OnPlatform: return "on_platform";
        case ObjectStatus::Grasped: return "grasped";
        case ObjectStatus::Knocked: return "knocked";
        case ObjectStatus::OffPlatform: return "off_platform";
    }
    return "?";
}

std::string to_string(GripperMode m) {
    switch (m) {
        case GripperMode::Open: return "open";
        case GripperMode::Closing: return "closing";
        case GripperMode::Closed: return "closed";
    }
    return "?";
}

std::array<Box, 2> finger_boxes(const Vec3& ee, double gap, const PlantConfig& c) {
    const double half_w = 0.5 * c.finger_width;
    const double inner = 0.5 * gap;
    Box left{{ee.x() - inner - c.finger_thickness, ee.y() - half_w, ee.z()},
             {ee.x() - inner, ee.y() + half_w, ee.z() + c.finger_length}};
    Box right{{ee.x() + inner, ee.y() - half_w, ee.z()},
              {ee.x() + inner + c.finger_thickness, ee.y() + half_w, ee.z() + c.finger_length}};
    return {left, right};
}

Box cube_box(const Vec3& center, double side) {
    const Vec3 h = Vec3::Constant(0.5 * side);
    return {center - h, center + h};
}

namespace {

double overlap_1d(double a_lo, double a_hi, double b_lo, double b_hi) {
    return std::min(a_hi, b_hi) - std::max(a_lo, b_lo);
}

bool boxes_intersect(const Box& a, const Box& b) {
    for (int k = 0; k < 3; ++k) {
        if (overlap_1d(a.lo[k], a.hi[k], b.lo[k], b.hi[k]) <= 0.0) return false;
    }
    return true;
}

// Smallest horizontal translation of `cube` that separates it from `finger`.
Vec2 separation(const Box& finger, const Box& cube) {
    const double candidates[4] = {finger.hi.x() - cube.lo.x(), -(cube.hi.x() - finger.lo.x()),
                                  finger.hi.y() - cube.lo.y(), -(cube.hi.y() - finger.lo.y())};
    int best = 0;
    for (int k = 1; k < 4; ++k) {
        if (std::abs(candidates[k]) < std::abs(candidates[best])) best = k;
    }
    return best < 2 ? Vec2(candidates[best], 0.0) : Vec2(0.0, candidates[best]);
}

// The cube is in the jaw: its centre lies between the inner faces along x
// and it overlaps the fingers along y and z.
bool between_fingers(const PlantState& s, double gap, const PlantConfig& c) {
    const Box cube = cube_box(s.object_center, c.cube_side);
    const auto fingers = finger_boxes(s.ee_pos, gap, c);
    return overlap_1d(cube.lo.y(), cube.hi.y(), fingers[0].lo.y(), fingers[0].hi.y()) > 0.0 &&
           overlap_1d(cube.lo.z(), cube.hi.z(), fingers[0].lo.z(), fingers[0].hi.z()) > 0.0 &&
           s.object_center.x() > fingers[0].hi.x() && s.object_center.x() < fingers[1].lo.x();
}

void place_on_platform(PlantState& s, const PlantConfig& c) {
    s.object_center = Vec3(s.platform_pos.x() + s.object_offset.x(),
                           s.platform_pos.y() + s.object_offset.y(),
                           c.platform_top_z + 0.5 * c.cube_side);
}

void resolve_contacts(PlantState& s, const PlantConfig& c) {
    for (const auto& finger : finger_boxes(s.ee_pos, s.gripper_gap, c)) {
        const Box cube = cube_box(s.object_center, c.cube_side);
        if (!boxes_intersect(finger, cube)) continue;
        const Vec2 push = separation(finger, cube);
        if (push.norm() > c.push_limit) {
            s.object_status = ObjectStatus::OffPlatform;
            return;
        }
        s.object_offset += push;
        if (std::abs(s.object_offset.x()) > c.platform_half ||
            std::abs(s.object_offset.y()) > c.platform_half) {
            s.object_status = ObjectStatus::OffPlatform;
            return;
        }
        place_on_platform(s, c);
    }
}

}  // namespace

PlantState init(const PlantConfig& config, const gcode::MotionTimeline& timeline) {
    config.validate();
    PlantState s;
    s.platform_pos = gcode::position_at_time(timeline, 0.0);
    s.ee_pos = Vec3(0.0, 0.0, config.platform_top_z + config.home_height);
    s.gripper_gap = config.finger_gap_open;
    s.gripper_mode = GripperMode::Open;
    s.object_status = ObjectStatus::OnPlatform;
    place_on_platform(s, config);
    return s;
}

PlantState step(const PlantState& state, const ControlAction& action,
                const gcode::MotionTimeline& timeline, double dt, const PlantConfig& c) {
    PlantState s = state;
    s.t = state.t + dt;
    s.closed_this_step = false;
    s.platform_pos = gcode::position_at_time(timeline, s.t);

    const Vec3 commanded = action.v.cwiseMax(-c.vmax_axis).cwiseMin(c.vmax_axis);
    const double dv = c.accel_max * dt;
    s.ee_vel = state.ee_vel + (commanded - state.ee_vel).cwiseMax(-dv).cwiseMin(dv);
    s.ee_pos += s.ee_vel * dt;

    switch (s.object_status) {
        case ObjectStatus::OnPlatform:
        case ObjectStatus::Knocked: place_on_platform(s, c); break;
        case ObjectStatus::Grasped: s.object_center = s.ee_pos + s.grasp_offset; break;
        case ObjectStatus::OffPlatform: break;
    }

    if (action.close && s.gripper_mode == GripperMode::Open) s.gripper_mode = GripperMode::Closing;

    const bool loose = s.object_status == ObjectStatus::OnPlatform ||
                       s.object_status == ObjectStatus::Knocked;
    if (s.gripper_mode == GripperMode::Closing) {
        const double gap = std::max(s.gripper_gap - c.close_speed * dt, 0.0);
        // Only jaws still wider than the cube can take it in.
        if (loose && s.gripper_gap >= c.cube_side && between_fingers(s, s.gripper_gap, c)) {
            // Inner faces sweep the cube toward the gap centre.
            const double half = 0.5 * c.cube_side;
            if (gap > c.cube_side) {
                const double lo = s.ee_pos.x() - 0.5 * gap + half;
                const double hi = s.ee_pos.x() + 0.5 * gap - half;
                const double x = std::clamp(s.object_center.x(), lo, hi);
                s.object_offset.x() += x - s.object_center.x();
                place_on_platform(s, c);
                s.gripper_gap = gap;
            } else {
                s.gripper_gap = c.cube_side;
                s.gripper_mode = GripperMode::Closed;
                s.closed_this_step = true;
            }
        } else {
            s.gripper_gap = gap;
            if (gap == 0.0) {
                s.gripper_mode = GripperMode::Closed;
                s.closed_this_step = true;
            }
        }
    }

    if (s.closed_this_step && loose) {
        if (classify_closure(s, c) == ClosureOutcome::Grasped) {
            s.object_offset.x() += s.ee_pos.x() - s.object_center.x();
            place_on_platform(s, c);
            s.object_status = ObjectStatus::Grasped;
            s.grasp_offset = s.object_center - s.ee_pos;
            return s;
        }
        s.object_status = ObjectStatus::Knocked;
    }

    if (s.object_status == ObjectStatus::OnPlatform || s.object_status == ObjectStatus::Knocked) {
        resolve_contacts(s, c);
    }
    return s;
}

ClosureOutcome classify_closure(const PlantState& s, const PlantConfig& c) {
    if (s.object_status != ObjectStatus::OnPlatform && s.object_status != ObjectStatus::Knocked &&
        s.object_status != ObjectStatus::Grasped) {
        return ClosureOutcome::Knocked;
    }
    const double side = c.cube_side;
    if (s.gripper_gap + 1e-9 < side) return ClosureOutcome::Knocked;

    const double offset_x = std::abs(s.object_center.x() - s.ee_pos.x());
    const double overlap_y =
        overlap_1d(s.object_center.y() - 0.5 * side, s.object_center.y() + 0.5 * side,
                   s.ee_pos.y() - 0.5 * c.finger_width, s.ee_pos.y() + 0.5 * c.finger_width);
    const double top = s.object_center.z() + 0.5 * side;

    const bool centred = offset_x <= 0.5 * (c.finger_gap_open - side) + 1e-9;
    const bool pinched = overlap_y >= c.overlap_min * side;
    const bool low_enough = s.ee_pos.z() <= top;
    return centred && pinched && low_enough ? ClosureOutcome::Grasped : ClosureOutcome::Knocked;
}

}  // namespace graspsim::plant
