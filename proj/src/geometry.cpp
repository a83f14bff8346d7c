#include "graspsim/geometry.hpp"

#include <algorithm>

namespace graspsim {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

Polygon convex_hull(std::vector<Vec2> points) {
    std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) return points;

    Polygon hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        const auto& p = points[i];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

double signed_area(const Polygon& poly) {
    if (poly.size() < 3) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        sum += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * sum;
}

AreaCentroid area_centroid(const Polygon& poly) {
    AreaCentroid out;
    if (poly.size() < 3) return out;
    // Shift to the first vertex to keep the moment sums well conditioned.
    const Vec2 origin = poly.front();
    double a2 = 0.0;
    Vec2 m = Vec2::Zero();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Vec2 p = poly[i] - origin;
        const Vec2 q = poly[(i + 1) % n] - origin;
        const double c = p.x() * q.y() - q.x() * p.y();
        a2 += c;
        m += (p + q) * c;
    }
    out.area = 0.5 * a2;
    if (a2 != 0.0) out.centroid = origin + m / (3.0 * a2);
    out.area = std::abs(out.area);
    return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
    Polygon output = subject;
    for (std::size_t i = 0, n = clip.size(); i < n && !output.empty(); ++i) {
        const Vec2& a = clip[i];
        const Vec2& b = clip[(i + 1) % n];
        const Polygon input = std::move(output);
        output.clear();
        for (std::size_t j = 0, m = input.size(); j < m; ++j) {
            const Vec2& p = input[j];
            const Vec2& q = input[(j + 1) % m];
            const double dp = cross(a, b, p);
            const double dq = cross(a, b, q);
            if (dp >= 0.0) output.push_back(p);
            if ((dp >= 0.0) != (dq >= 0.0)) {
                const double s = dp / (dp - dq);
                output.push_back(p + s * (q - p));
            }
        }
    }
    if (output.size() < 3) output.clear();
    return output;
}

Polygon square(double half) {
    return {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
}

bool point_in_convex(const Polygon& poly, const Vec2& p) {
    if (poly.size() < 3) return false;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        if (cross(poly[i], poly[(i + 1) % n], p) < 0.0) return false;
    }
    return true;
}

AreaCentroid subtract_convex(const Polygon& region, const std::vector<Polygon>& holes) {
    const AreaCentroid base = area_centroid(region);
    double area = base.area;
    Vec2 moment = base.centroid * base.area;

    const std::size_t n = holes.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        Polygon piece = region;
        int bits = 0;
        for (std::size_t h = 0; h < n && !piece.empty(); ++h) {
            if (mask & (std::size_t{1} << h)) {
                piece = clip_convex(piece, holes[h]);
                ++bits;
            }
        }
        if (piece.empty()) continue;
        const AreaCentroid ac = area_centroid(piece);
        const double sign = (bits % 2 == 1) ? -1.0 : 1.0;
        area += sign * ac.area;
        moment += sign * ac.area * ac.centroid;
    }

    AreaCentroid out;
    out.area = std::max(area, 0.0);
    if (out.area > 0.0) out.centroid = moment / area;
    return out;
}

}  // namespace graspsim
