#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the code they check beyond reading plain data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "graspsim/geometry.hpp"
#include "graspsim/percept.hpp"
#include "graspsim/traj.hpp"

namespace oracle {

using graspsim::Vec2;
using graspsim::Vec3;

// chi2.ppf(0.99, df) for the bin counts used in the tests, frozen from scipy.
inline constexpr double kChi2Crit99Df26 = 45.64168266628317;

inline double chi_square_uniform(const std::vector<std::size_t>& counts) {
    double n = 0.0;
    for (auto c : counts) n += static_cast<double>(c);
    const double expected = n / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// Point on an element at parameter u in [0, 1], from the raw fields.
inline Vec2 element_param_point(const graspsim::traj::PathElement& e, double u) {
    if (const auto* l = std::get_if<graspsim::traj::Line>(&e)) return l->start + u * (l->end - l->start);
    const auto& a = std::get<graspsim::traj::Arc>(e);
    const double ang = a.start_angle + u * a.sweep;
    return a.center + a.radius * Vec2(std::cos(ang), std::sin(ang));
}

// Polyline length over `n` uniform subdivisions.
inline double chord_length(const graspsim::traj::PathElement& e, std::size_t n) {
    double len = 0.0;
    Vec2 prev = element_param_point(e, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        const Vec2 p = element_param_point(e, static_cast<double>(k) / static_cast<double>(n));
        len += (p - prev).norm();
        prev = p;
    }
    return len;
}

// Perpendicular (finger-width axis) overlap between a cube offset by dy and
// a finger of width w centred on y = 0.
inline double perpendicular_overlap(double dy, double side, double w) {
    const double lo = std::max(dy - 0.5 * side, -0.5 * w);
    const double hi = std::min(dy + 0.5 * side, 0.5 * w);
    return std::max(0.0, hi - lo);
}

struct RasterResult {
    bool visible{false};
    double area{0.0};  // fraction of the image
    Vec2 centroid{Vec2::Zero()};
};

inline bool inside_convex(const graspsim::Polygon& poly, const Vec2& p) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
        if (cross < 0.0) return false;
    }
    return n >= 3;
}

// Casts one ray per pixel centre of an n x n grid over [-1, 1]^2 and tests it
// against the axis-aligned cube with a slab intersection. Pixels inside any
// static occluder are dropped. Hits closer than the near plane do not count.
inline RasterResult rasterize(const graspsim::percept::CameraModel& cam, const Vec3& ee_pos,
                              const Vec3& cube_center, double side, int n = 2048) {
    const Vec3 c = cube_center - ee_pos;
    const Vec3 lo = c - Vec3::Constant(0.5 * side);
    const Vec3 hi = c + Vec3::Constant(0.5 * side);
    const double tx = std::tan(cam.fov_half_x);
    const double ty = std::tan(cam.fov_half_y);
    const Vec3 o = cam.translation;
    const double pix = 2.0 / n;

    double count = 0.0, su = 0.0, sv = 0.0;
    for (int j = 0; j < n; ++j) {
        const double v = -1.0 + (j + 0.5) * pix;
        for (int i = 0; i < n; ++i) {
            const double u = -1.0 + (i + 0.5) * pix;
            // Camera-frame direction with unit depth, so the ray parameter is the depth.
            const Vec3 d = cam.rotation * Vec3(u * tx, v * ty, 1.0);
            double t0 = graspsim::percept::kNearPlane;
            double t1 = std::numeric_limits<double>::infinity();
            bool hit = true;
            for (int k = 0; k < 3 && hit; ++k) {
                if (std::abs(d[k]) < 1e-15) {
                    if (o[k] < lo[k] || o[k] > hi[k]) hit = false;
                    continue;
                }
                double a = (lo[k] - o[k]) / d[k];
                double b = (hi[k] - o[k]) / d[k];
                if (a > b) std::swap(a, b);
                t0 = std::max(t0, a);
                t1 = std::min(t1, b);
                if (t0 > t1) hit = false;
            }
            if (!hit) continue;
            bool hidden = false;
            for (const auto& occ : cam.occluders) {
                if (inside_convex(occ, {u, v})) {
                    hidden = true;
                    break;
                }
            }
            if (hidden) continue;
            count += 1.0;
            su += u;
            sv += v;
        }
    }
    RasterResult r;
    if (count == 0.0) return r;
    r.visible = true;
    r.area = count / (static_cast<double>(n) * n);
    r.centroid = Vec2(su / count, sv / count);
    return r;
}

// Image coordinates by explicit homogeneous arithmetic: [R^T | -R^T t] then
// the intrinsic scaling diag(1/tan fx, 1/tan fy, 1) and perspective divide.
inline Vec2 manual_project(const graspsim::Mat3& rotation, const Vec3& translation, double fov_half_x,
                           double fov_half_y, const Vec3& ee_point) {
    Eigen::Matrix<double, 3, 4> extrinsic;
    extrinsic.leftCols<3>() = rotation.transpose();
    extrinsic.col(3) = -rotation.transpose() * translation;
    Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
    k(0, 0) = 1.0 / std::tan(fov_half_x);
    k(1, 1) = 1.0 / std::tan(fov_half_y);
    k(2, 2) = 1.0;
    const Eigen::Vector3d h = k * extrinsic * Eigen::Vector4d(ee_point.x(), ee_point.y(), ee_point.z(), 1.0);
    return {h.x() / h.z(), h.y() / h.z()};
}

}  // namespace oracle
