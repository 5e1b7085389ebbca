#include "blockplan/geometry.hpp"

#include <algorithm>
#include <limits>

namespace blockplan {

namespace {

// Projection radius of a yaw-rotated rectangle onto a unit axis in the plane.
double project_radius(double hx, double hy, double yaw, double ax, double ay) {
    double c = std::cos(yaw), s = std::sin(yaw);
    // Local axes in world coordinates.
    double ux = c, uy = s;
    double vx = -s, vy = c;
    return hx * std::abs(ax * ux + ay * uy) + hy * std::abs(ax * vx + ay * vy);
}

}  // namespace

double rect_overlap_depth(const Vec3& center_a, double hx_a, double hy_a, double yaw_a,
                          const Vec3& center_b, double hx_b, double hy_b, double yaw_b) {
    double dx = center_b.x - center_a.x;
    double dy = center_b.y - center_a.y;
    double depth = std::numeric_limits<double>::infinity();
    const double yaws[2] = {yaw_a, yaw_b};
    for (double yaw : yaws) {
        double c = std::cos(yaw), s = std::sin(yaw);
        const double axes[2][2] = {{c, s}, {-s, c}};
        for (const auto& axis : axes) {
            double ra = project_radius(hx_a, hy_a, yaw_a, axis[0], axis[1]);
            double rb = project_radius(hx_b, hy_b, yaw_b, axis[0], axis[1]);
            double overlap = ra + rb - std::abs(dx * axis[0] + dy * axis[1]);
            depth = std::min(depth, overlap);
        }
    }
    return depth;
}

double upright_box_overlap_depth(const Vec3& pos_a, const Vec3& dims_a, double yaw_a,
                                 const Vec3& pos_b, const Vec3& dims_b, double yaw_b) {
    double za = dims_a.z * 0.5, zb = dims_b.z * 0.5;
    double overlap_z = za + zb - std::abs(pos_b.z - pos_a.z);
    double overlap_xy = rect_overlap_depth(pos_a, dims_a.x * 0.5, dims_a.y * 0.5, yaw_a,
                                           pos_b, dims_b.x * 0.5, dims_b.y * 0.5, yaw_b);
    return std::min(overlap_z, overlap_xy);
}

}  // namespace blockplan
