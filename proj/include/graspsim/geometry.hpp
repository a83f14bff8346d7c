#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace graspsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Closed polygon, vertices counter-clockwise, last vertex not repeated.
using Polygon = std::vector<Vec2>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a <= 0.0) a += kTwoPi;
    return a - kPi;
}

inline Vec2 unit_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

struct AreaCentroid {
    double area{0.0};
    Vec2 centroid{Vec2::Zero()};
};

// Andrew's monotone chain. Collinear points are dropped; the result is CCW.
Polygon convex_hull(std::vector<Vec2> points);

// Signed shoelace area (positive for CCW).
double signed_area(const Polygon& poly);

AreaCentroid area_centroid(const Polygon& poly);

// Sutherland-Hodgman: clips `subject` against a convex CCW `clip` polygon.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

// Axis-aligned square [-half, half]^2 as a CCW polygon.
Polygon square(double half);

bool point_in_convex(const Polygon& poly, const Vec2& p);

// Area and centroid of `region \ (holes[0] ∪ holes[1] ∪ ...)` for convex
// region and holes, by inclusion-exclusion over hole intersections.
AreaCentroid subtract_convex(const Polygon& region, const std::vector<Polygon>& holes);

}  // namespace graspsim
