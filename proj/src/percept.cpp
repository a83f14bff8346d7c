#include "graspsim/percept.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "graspsim/error.hpp"

namespace graspsim::percept {

namespace {

Mat3 rot_x(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
}
Mat3 rot_y(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}
Mat3 rot_z(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

// Camera axes for a camera looking straight down with u along +x.
Mat3 down_basis() {
    Mat3 r;
    r.col(0) = Vec3(1.0, 0.0, 0.0);
    r.col(1) = Vec3(0.0, -1.0, 0.0);
    r.col(2) = Vec3(0.0, 0.0, -1.0);
    return r;
}

std::array<Vec3, 8> box_corners(const Vec3& lo, const Vec3& hi) {
    std::array<Vec3, 8> c;
    for (int k = 0; k < 8; ++k) {
        c[k] = Vec3((k & 1) ? hi.x() : lo.x(), (k & 2) ? hi.y() : lo.y(), (k & 4) ? hi.z() : lo.z());
    }
    return c;
}

// Silhouette of a convex box (given by its 8 corners in ee frame, indexed by
// bit pattern) after clipping at the near plane.
Polygon box_silhouette(const CameraModel& camera, const std::array<Vec3, 8>& corners_ee) {
    std::array<Vec3, 8> cam;
    for (int k = 0; k < 8; ++k) cam[k] = to_camera(camera, corners_ee[k]);

    std::vector<Vec2> pts;
    for (int k = 0; k < 8; ++k) {
        if (cam[k].z() >= kNearPlane) pts.push_back(project(camera, cam[k]));
    }
    for (int a = 0; a < 8; ++a) {
        for (int bit = 1; bit < 8; bit <<= 1) {
            const int b = a | bit;
            if (b == a) continue;
            const double za = cam[a].z() - kNearPlane;
            const double zb = cam[b].z() - kNearPlane;
            if ((za < 0.0) == (zb < 0.0)) continue;
            const double s = za / (za - zb);
            const Vec3 p = cam[a] + s * (cam[b] - cam[a]);
            pts.push_back(project(camera, Vec3(p.x(), p.y(), kNearPlane)));
        }
    }
    if (pts.size() < 3) return {};
    return convex_hull(std::move(pts));
}

}  // namespace

CameraModel CameraModel::looking_down(std::string id, const Vec3& translation, double yaw,
                                      double pitch, double roll, double fov_half_x,
                                      double fov_half_y) {
    CameraModel c;
    c.id = std::move(id);
    c.translation = translation;
    c.rotation = rot_z(yaw) * rot_y(pitch) * rot_x(roll) * down_basis();
    c.fov_half_x = fov_half_x;
    c.fov_half_y = fov_half_y;
    return c;
}

double CameraModel::yaw() const {
    const Vec3 u = rotation.col(0);
    return std::atan2(u.y(), u.x());
}

void CameraModel::validate() const {
    if (id.empty()) throw ConfigError("camera id must not be empty");
    const auto in_range = [](double a) { return a > 0.0 && a < kPi / 2.0; };
    if (!in_range(fov_half_x) || !in_range(fov_half_y)) {
        throw ConfigError(fmt::format("camera '{}': field-of-view half angles must be in (0, 90) deg", id));
    }
    if (!(rotation.transpose() * rotation).isApprox(Mat3::Identity(), 1e-9) ||
        std::abs(rotation.determinant() - 1.0) > 1e-9) {
        throw ConfigError(fmt::format("camera '{}': mount rotation is not orthonormal", id));
    }
}

std::string to_string(PerceptionKind kind) {
    switch (kind) {
        case PerceptionKind::Wrist: return "wrist";
        case PerceptionKind::SingleHand: return "single_hand";
        case PerceptionKind::DualHand: return "dual_hand";
    }
    return "?";
}

PerceptionKind perception_kind_from_string(const std::string& s) {
    if (s == "wrist") return PerceptionKind::Wrist;
    if (s == "single_hand" || s == "single") return PerceptionKind::SingleHand;
    if (s == "dual_hand" || s == "dual") return PerceptionKind::DualHand;
    throw ConfigError(fmt::format("unknown perception config '{}' (expected wrist, single_hand, dual_hand)", s));
}

void PerceptionConfig::validate() const {
    const std::size_t expected = kind == PerceptionKind::DualHand ? 2 : 1;
    if (cameras.size() != expected) {
        throw ConfigError(fmt::format("perception '{}' needs {} camera(s)", label(), expected));
    }
    for (const auto& c : cameras) c.validate();
    if (expected == 2 && cameras[0].id == cameras[1].id) {
        throw ConfigError("dual_hand cameras must have distinct ids");
    }
}

Vec3 to_camera(const CameraModel& camera, const Vec3& ee_point) {
    return camera.rotation.transpose() * (ee_point - camera.translation);
}

Vec2 project(const CameraModel& camera, const Vec3& p) {
    return {p.x() / p.z() / std::tan(camera.fov_half_x), p.y() / p.z() / std::tan(camera.fov_half_y)};
}

Polygon cube_silhouette(const CameraModel& camera, const Vec3& ee_pos, const Vec3& cube_center,
                        double cube_side) {
    const Vec3 c = cube_center - ee_pos;
    const Vec3 h = Vec3::Constant(0.5 * cube_side);
    return box_silhouette(camera, box_corners(c - h, c + h));
}

Observation observe(const CameraModel& camera, const plant::PlantState& state,
                    const plant::PlantConfig& config) {
    Observation obs;
    obs.camera_id = camera.id;
    obs.t = state.t;

    const Polygon hull = cube_silhouette(camera, state.ee_pos, state.object_center, config.cube_side);
    if (hull.empty()) return obs;
    const Polygon in_image = clip_convex(hull, square(1.0));
    if (in_image.empty()) return obs;

    const AreaCentroid ac = subtract_convex(in_image, camera.occluders);
    const double area = ac.area / 4.0;
    if (area > kVisibleAreaMin) {
        obs.visible = true;
        obs.centroid = ac.centroid;
        obs.area = area;
    }
    return obs;
}

Vec3 grasp_center(const plant::PlantConfig& config) {
    return {0.0, 0.0, 0.5 * config.cube_side - config.grasp_height()};
}

Vec2 desired_point(const CameraModel& camera, const plant::PlantConfig& config) {
    const Vec3 p = to_camera(camera, grasp_center(config));
    if (p.z() < kNearPlane) {
        throw GoalOutsideView(fmt::format("camera '{}': grasp centre is behind the camera", camera.id));
    }
    const Vec2 uv = project(camera, p);
    if (std::abs(uv.x()) > 1.0 || std::abs(uv.y()) > 1.0) {
        throw GoalOutsideView(fmt::format("camera '{}': grasp centre projects to ({:.3f}, {:.3f})",
                                          camera.id, uv.x(), uv.y()));
    }
    return uv;
}

std::vector<Polygon> finger_occluders(const CameraModel& camera, const plant::PlantConfig& config) {
    std::vector<Polygon> out;
    for (const auto& finger : plant::finger_boxes(Vec3::Zero(), config.finger_gap_open, config)) {
        const Polygon sil = box_silhouette(camera, box_corners(finger.lo, finger.hi));
        if (sil.empty()) continue;
        Polygon clipped = clip_convex(sil, square(1.0));
        if (!clipped.empty()) out.push_back(std::move(clipped));
    }
    return out;
}

Polygon frustum_footprint(const CameraModel& camera, double z) {
    const double tx = std::tan(camera.fov_half_x);
    const double ty = std::tan(camera.fov_half_y);
    // Image corners in CCW order as seen from above (v points along -y).
    const Vec2 corners[4] = {{-1.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}};
    std::vector<Vec2> pts;
    for (const auto& uv : corners) {
        const Vec3 dir = camera.rotation * Vec3(uv.x() * tx, uv.y() * ty, 1.0);
        if (dir.z() >= 0.0) return {};
        const double s = (z - camera.translation.z()) / dir.z();
        if (s <= 0.0) return {};
        const Vec3 hit = camera.translation + s * dir;
        pts.emplace_back(hit.x(), hit.y());
    }
    return convex_hull(std::move(pts));
}

// ─── Default rigs ───────────────────────────────────────────────────────────

CameraModel CameraMount::build(const plant::PlantConfig& config) const {
    auto cam = CameraModel::looking_down(id, translation, deg2rad(yaw_deg), deg2rad(pitch_deg),
                                         deg2rad(roll_deg), deg2rad(fov_half_x_deg),
                                         deg2rad(fov_half_y_deg));
    cam.occluders = occluders;
    if (finger_occluders) {
        for (auto& poly : percept::finger_occluders(cam, config)) cam.occluders.push_back(std::move(poly));
    }
    return cam;
}

CameraMount default_wrist_mount() {
    CameraMount m;
    m.id = "wrist";
    // Outboard of the -x finger and tilted toward the jaw; see README for how
    // the offsets were chosen.
    m.translation = Vec3(-58.0, 0.0, 115.0);
    m.pitch_deg = -15.0;
    m.fov_half_x_deg = 35.0;
    m.fov_half_y_deg = 26.0;
    m.finger_occluders = true;
    return m;
}

CameraMount default_hand_mount_a() {
    CameraMount m;
    m.id = "hand_a";
    // On the gripper body, 100 mm above the fingertips.
    m.translation = Vec3(35.0, 0.0, 100.0);
    m.pitch_deg = 25.0;
    m.fov_half_x_deg = 31.0;
    m.fov_half_y_deg = 24.0;
    return m;
}

CameraMount default_hand_mount_b() {
    CameraMount m = default_hand_mount_a();
    m.id = "hand_b";
    m.translation.x() = -m.translation.x();
    m.pitch_deg = -m.pitch_deg;
    return m;
}

CameraModel default_wrist_camera(const plant::PlantConfig& config) { return default_wrist_mount().build(config); }

CameraModel default_hand_camera_a() { return default_hand_mount_a().build(plant::PlantConfig{}); }

CameraModel default_hand_camera_b() { return default_hand_mount_b().build(plant::PlantConfig{}); }

PerceptionConfig make_perception(PerceptionKind kind, const CameraModel& wrist,
                                 const CameraModel& hand_a, const CameraModel& hand_b) {
    PerceptionConfig p;
    p.kind = kind;
    switch (kind) {
        case PerceptionKind::Wrist: p.cameras = {wrist}; break;
        case PerceptionKind::SingleHand: p.cameras = {hand_a}; break;
        case PerceptionKind::DualHand: p.cameras = {hand_a, hand_b}; break;
    }
    return p;
}

// ─── SVG view ───────────────────────────────────────────────────────────────

namespace {

std::string svg_points(const Polygon& poly, double size) {
    std::string out;
    for (const auto& p : poly) {
        out += fmt::format("{:.2f},{:.2f} ", (p.x() + 1.0) * 0.5 * size, (p.y() + 1.0) * 0.5 * size);
    }
    return out;
}

}  // namespace

std::string render_view_svg(const CameraModel& camera, const plant::PlantState& state,
                            const plant::PlantConfig& config) {
    constexpr double size = 400.0;
    const double margin = 0.5 * size;
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
        "viewBox=\"{1} {1} {2} {2}\">\n",
        size + 2 * margin, -margin, size + 2 * margin);
    svg += fmt::format("<title>camera {} at t={:.3f}s</title>\n", camera.id, state.t);
    svg += fmt::format(
        "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"#f4f4f4\" stroke=\"#000\"/>\n", size);
    for (const auto& occ : camera.occluders) {
        svg += fmt::format("<polygon points=\"{}\" fill=\"#777\" fill-opacity=\"0.6\"/>\n",
                           svg_points(occ, size));
    }
    const Polygon hull = cube_silhouette(camera, state.ee_pos, state.object_center, config.cube_side);
    if (!hull.empty()) {
        svg += fmt::format(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"#c00\" stroke-dasharray=\"4 3\"/>\n",
            svg_points(hull, size));
        const Polygon clipped = clip_convex(hull, square(1.0));
        if (!clipped.empty()) {
            svg += fmt::format("<polygon points=\"{}\" fill=\"#e22\" fill-opacity=\"0.7\"/>\n",
                               svg_points(clipped, size));
        }
    }
    const Observation obs = observe(camera, state, config);
    if (obs.visible) {
        const Vec2 c = *obs.centroid;
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#00f\"/>\n",
                           (c.x() + 1.0) * 0.5 * size, (c.y() + 1.0) * 0.5 * size);
    }
    try {
        const Vec2 g = desired_point(camera, config);
        svg += fmt::format(
            "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"6\" fill=\"none\" stroke=\"#0a0\" stroke-width=\"2\"/>\n",
            (g.x() + 1.0) * 0.5 * size, (g.y() + 1.0) * 0.5 * size);
    } catch (const GoalOutsideView&) {
    }
    svg += fmt::format("<text x=\"4\" y=\"-8\" font-size=\"14\">{} visible={} area={:.5f}</text>\n",
                       camera.id, obs.visible ? "yes" : "no", obs.area.value_or(0.0));
    svg += "</svg>\n";
    return svg;
}

}  // namespace graspsim::percept
