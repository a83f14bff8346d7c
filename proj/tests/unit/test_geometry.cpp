#include <gtest/gtest.h>

#include "graspsim/geometry.hpp"

using namespace graspsim;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

}  // namespace

TEST(Geometry, WrapAngleRange) {
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
    EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
    EXPECT_NEAR(wrap_angle(0.25 + 4.0 * kPi), 0.25, 1e-12);
}

TEST(Geometry, HullDropsInteriorAndCollinearPoints) {
    const auto hull = convex_hull({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {0, 1}});
    ASSERT_EQ(hull.size(), 4u);
    EXPECT_GT(signed_area(hull), 0.0);
    EXPECT_DOUBLE_EQ(signed_area(hull), 4.0);
}

TEST(Geometry, AreaCentroidOfTriangle) {
    const auto ac = area_centroid({{0, 0}, {3, 0}, {0, 3}});
    EXPECT_DOUBLE_EQ(ac.area, 4.5);
    EXPECT_NEAR(ac.centroid.x(), 1.0, 1e-15);
    EXPECT_NEAR(ac.centroid.y(), 1.0, 1e-15);
}

TEST(Geometry, ClipRectangles) {
    const auto clipped = clip_convex(rect(-2, -2, 0.5, 0.5), square(1.0));
    const auto ac = area_centroid(clipped);
    EXPECT_NEAR(ac.area, 1.5 * 1.5, 1e-12);
    EXPECT_NEAR(ac.centroid.x(), -0.25, 1e-12);
    EXPECT_NEAR(ac.centroid.y(), -0.25, 1e-12);
    EXPECT_TRUE(clip_convex(rect(2, 2, 3, 3), square(1.0)).empty());
}

TEST(Geometry, PointInConvex) {
    const auto sq = square(1.0);
    EXPECT_TRUE(point_in_convex(sq, {0.0, 0.0}));
    EXPECT_FALSE(point_in_convex(sq, {1.5, 0.0}));
}

TEST(Geometry, SubtractOverlappingHoles) {
    // Two holes that overlap each other: inclusion-exclusion must not
    // subtract their intersection twice.
    const Polygon region = rect(0, 0, 4, 4);
    const std::vector<Polygon> holes{rect(0, 0, 2, 2), rect(1, 1, 3, 3)};
    const auto ac = subtract_convex(region, holes);
    EXPECT_NEAR(ac.area, 16.0 - 4.0 - 4.0 + 1.0, 1e-12);

    // Centroid from moments: region minus union, with the union split into
    // disjoint rectangles.
    const double m_region_x = 16.0 * 2.0;
    const double union_area = 7.0;
    const double m_union_x = 4.0 * 1.0 + 2.0 * 2.5 + 1.0 * 1.5;  // [0,2]^2, [2,3]x[1,3], [1,2]x[2,3]
    EXPECT_NEAR(ac.centroid.x(), (m_region_x - m_union_x) / (16.0 - union_area), 1e-12);
    EXPECT_NEAR(ac.centroid.x(), ac.centroid.y(), 1e-12);
}

TEST(Geometry, SubtractEverything) {
    const auto ac = subtract_convex(rect(0, 0, 1, 1), {rect(-1, -1, 2, 2)});
    EXPECT_NEAR(ac.area, 0.0, 1e-12);
}
