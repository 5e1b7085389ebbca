#pragma once

#include <vector>

#include "blockplan/geometry.hpp"

namespace blockplan {

struct Obb {
    Vec3 center;
    Mat3 rot;   // columns are the local axes in world coordinates
    Vec3 half;  // half extents

    std::vector<Vec3> vertices() const;
    void world_aabb(Vec3& lo, Vec3& hi) const;
};

struct ContactPoint {
    Vec3 point;  // world position, midway between the surfaces
    double gap;  // signed separation along the normal; negative = penetration
};

struct ContactManifold {
    int body_a = -1;  // -1 identifies the ground plane
    int body_b = -1;
    Vec3 normal;      // unit, pointing from A toward B
    std::vector<ContactPoint> points;
};

// Contacts between two boxes within `margin` separation (SAT over the 15
// candidate axes, face-clipped manifolds, single-point edge-edge contacts).
// Returns false when separated beyond margin.
bool box_box_contact(const Obb& a, const Obb& b, double margin, ContactManifold& out);

// Contacts of box vertices against the ground plane z=0 within `margin`.
bool box_ground_contact(const Obb& box, double margin, ContactManifold& out);

}  // namespace blockplan
