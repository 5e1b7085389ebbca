#include <doctest.h>

#include <cmath>

#include "blockplan/collision.hpp"

using namespace blockplan;

namespace {

Obb box(double x, double y, double z, double hx = 0.5, double hy = 0.5, double hz = 0.5,
        double yaw = 0.0) {
    Obb o;
    o.center = {x, y, z};
    o.rot = Quat::from_yaw(yaw).to_matrix();
    o.half = {hx, hy, hz};
    return o;
}

}  // namespace

TEST_CASE("collision: stacked cubes produce a four-point face manifold") {
    Obb a = box(0, 0, 0.5);
    Obb b = box(0, 0, 1.5);
    ContactManifold m;
    REQUIRE(box_box_contact(a, b, 0.02, m));
    CHECK(m.points.size() == 4);
    CHECK(m.normal.z == doctest::Approx(1.0));
    for (const ContactPoint& p : m.points) {
        CHECK(p.gap == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(p.point.z == doctest::Approx(1.0));
    }
}

TEST_CASE("collision: separated boxes beyond margin yield no contact") {
    Obb a = box(0, 0, 0.5);
    Obb b = box(0, 0, 1.6);  // 0.1 gap
    ContactManifold m;
    CHECK_FALSE(box_box_contact(a, b, 0.02, m));
    CHECK(box_box_contact(a, b, 0.2, m));
    for (const ContactPoint& p : m.points) CHECK(p.gap == doctest::Approx(0.1));
}

TEST_CASE("collision: penetration depth is reported") {
    Obb a = box(0, 0, 0.5);
    Obb b = box(0, 0, 1.45);  // 0.05 penetration
    ContactManifold m;
    REQUIRE(box_box_contact(a, b, 0.02, m));
    for (const ContactPoint& p : m.points) CHECK(p.gap == doctest::Approx(-0.05));
}

TEST_CASE("collision: offset stack clips the overlap region") {
    Obb a = box(0, 0, 0.5);
    Obb b = box(0.6, 0, 1.5);
    ContactManifold m;
    REQUIRE(box_box_contact(a, b, 0.02, m));
    REQUIRE(m.points.size() == 4);
    for (const ContactPoint& p : m.points) {
        CHECK(p.point.x >= 0.1 - 1e-9);
        CHECK(p.point.x <= 0.5 + 1e-9);
    }
}

TEST_CASE("collision: yaw-rotated box still collides with support") {
    Obb a = box(0, 0, 0.5);
    Obb b = box(0, 0, 1.5, 0.5, 0.5, 0.5, 0.7);
    ContactManifold m;
    REQUIRE(box_box_contact(a, b, 0.02, m));
    CHECK(m.points.size() >= 4);  // rotated face clips to an octagon
    CHECK(std::abs(m.normal.z) == doctest::Approx(1.0));
}

TEST_CASE("collision: side-by-side touching faces use a horizontal normal") {
    Obb a = box(0, 0, 0.5);
    Obb b = box(1.0, 0, 0.5);
    ContactManifold m;
    REQUIRE(box_box_contact(a, b, 0.02, m));
    CHECK(std::abs(m.normal.x) == doctest::Approx(1.0));
    CHECK(std::abs(m.normal.z) < 1e-9);
}

TEST_CASE("collision: ground contact reports vertex gaps") {
    Obb a = box(0, 0, 0.5);
    ContactManifold m;
    REQUIRE(box_ground_contact(a, 0.02, m));
    CHECK(m.points.size() == 4);
    for (const ContactPoint& p : m.points) CHECK(p.gap == doctest::Approx(0.0));

    Obb lifted = box(0, 0, 0.65);
    REQUIRE(box_ground_contact(lifted, 0.2, m));
    for (const ContactPoint& p : m.points) CHECK(p.gap == doctest::Approx(0.15));

    Obb high = box(0, 0, 2.0);
    CHECK_FALSE(box_ground_contact(high, 0.2, m));
}

TEST_CASE("collision: edge-edge contact between crossed boxes") {
    // Long thin boxes crossed at right angles, the upper one resting across
    // the lower: the contact normal should be vertical.
    Obb a = box(0, 0, 0.5, 2.0, 0.1, 0.1);
    Obb b = box(0, 0, 0.75, 0.1, 2.0, 0.1, 0.0);
    // rotate a little so face axes are not cleanly separating
    b.rot = (Quat::from_axis_angle({1, 0, 0}, 0.3)).to_matrix();
    ContactManifold m;
    bool hit = box_box_contact(a, b, 0.3, m);
    CHECK(hit);
    REQUIRE(!m.points.empty());
}

TEST_CASE("collision: deterministic output") {
    Obb a = box(0.11, -0.2, 0.5, 0.5, 0.5, 0.5, 0.3);
    Obb b = box(0.4, 0.25, 1.45, 0.5, 0.5, 0.5, -0.9);
    ContactManifold m1, m2;
    bool h1 = box_box_contact(a, b, 0.05, m1);
    bool h2 = box_box_contact(a, b, 0.05, m2);
    REQUIRE(h1 == h2);
    REQUIRE(m1.points.size() == m2.points.size());
    for (std::size_t i = 0; i < m1.points.size(); ++i) {
        CHECK(m1.points[i].point == m2.points[i].point);
        CHECK(m1.points[i].gap == m2.points[i].gap);
    }
}
