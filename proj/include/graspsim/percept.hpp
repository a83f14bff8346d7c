#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspsim/geometry.hpp"
#include "graspsim/plant.hpp"

namespace graspsim::percept {

/// Pinhole camera rigidly attached to the end-effector.
///
/// `rotation` maps camera-frame vectors into the ee frame; its columns are the
/// camera x (image u, right), y (image v, down) and z (optical axis) axes.
/// Normalized image coordinates are u = (x/z) / tan(fov_half_x) and
/// v = (y/z) / tan(fov_half_y), so the image is the square [-1, 1]^2.
struct CameraModel {
    std::string id;
    Vec3 translation{Vec3::Zero()};  // mm, ee frame
    Mat3 rotation{Mat3::Identity()};
    double fov_half_x{0.6};  // rad
    double fov_half_y{0.45};
    // Static occluders in normalized image space, convex and CCW.
    std::vector<Polygon> occluders;

    /// Optical axis pointing down the descent axis, image u along ee +x and
    /// v along ee -y, then rotated by roll (about x), pitch (about y) and
    /// yaw (about z), all in radians.
    static CameraModel looking_down(std::string id, const Vec3& translation, double yaw,
                                    double pitch, double roll, double fov_half_x,
                                    double fov_half_y);

    /// Heading of image +u projected on the workspace plane.
    double yaw() const;

    void validate() const;
};

enum class PerceptionKind { Wrist, SingleHand, DualHand };

std::string to_string(PerceptionKind kind);
PerceptionKind perception_kind_from_string(const std::string& s);

struct PerceptionConfig {
    PerceptionKind kind{PerceptionKind::Wrist};
    std::vector<CameraModel> cameras;

    std::string label() const { return to_string(kind); }
    void validate() const;
};

struct Observation {
    std::string camera_id;
    bool visible{false};
    std::optional<Vec2> centroid;
    std::optional<double> area;  // fraction of the image area
    double t{0.0};
};

inline constexpr double kNearPlane = 1.0;         // mm
inline constexpr double kVisibleAreaMin = 1e-6;   // fraction of image area

/// Point in the ee frame expressed in the camera frame.
Vec3 to_camera(const CameraModel& camera, const Vec3& ee_point);

/// Normalized image coordinates of a camera-frame point in front of the camera.
Vec2 project(const CameraModel& camera, const Vec3& camera_point);

/// Convex silhouette of an axis-aligned cube, clipped at the near plane,
/// before image-square clipping and occlusion. Empty if fully behind.
Polygon cube_silhouette(const CameraModel& camera, const Vec3& ee_pos, const Vec3& cube_center,
                        double cube_side);

Observation observe(const CameraModel& camera, const plant::PlantState& state,
                    const plant::PlantConfig& config);

/// Cube centre relative to the ee when the cube sits centred between the
/// fingertips at grasp height.
Vec3 grasp_center(const plant::PlantConfig& config);

/// Image position of the grasp centre. Throws GoalOutsideView if it falls
/// outside the image square.
Vec2 desired_point(const CameraModel& camera, const plant::PlantConfig& config);

/// Projected silhouettes of the open fingers, clipped to the image.
std::vector<Polygon> finger_occluders(const CameraModel& camera, const plant::PlantConfig& config);

/// Footprint of the camera frustum on the horizontal plane at ee-relative
/// height `z`, in ee-frame xy. Empty if some frustum ray misses the plane.
Polygon frustum_footprint(const CameraModel& camera, double z);

// ─── Mounts and default rigs ────────────────────────────────────────────────

/// Parametric description of a camera mount as it appears in config files.
/// Angles in degrees; field of view as half angles.
struct CameraMount {
    std::string id;
    Vec3 translation{Vec3::Zero()};
    double yaw_deg{0.0};
    double pitch_deg{0.0};
    double roll_deg{0.0};
    double fov_half_x_deg{35.0};
    double fov_half_y_deg{26.0};
    // Adds the projected open-finger silhouettes as occluders.
    bool finger_occluders{false};
    std::vector<Polygon> occluders;

    CameraModel build(const plant::PlantConfig& config) const;

    friend bool operator==(const CameraMount&, const CameraMount&) = default;
};

CameraMount default_wrist_mount();
CameraMount default_hand_mount_a();
CameraMount default_hand_mount_b();

CameraModel default_wrist_camera(const plant::PlantConfig& config);
CameraModel default_hand_camera_a();
CameraModel default_hand_camera_b();

PerceptionConfig make_perception(PerceptionKind kind, const CameraModel& wrist,
                                 const CameraModel& hand_a, const CameraModel& hand_b);

/// Standalone SVG of a camera's view: image border, occluders, raw and
/// visible cube silhouette, centroid and goal.
std::string render_view_svg(const CameraModel& camera, const plant::PlantState& state,
                            const plant::PlantConfig& config);

}  // namespace graspsim::percept
