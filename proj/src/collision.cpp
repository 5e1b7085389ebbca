#include "blockplan/collision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace blockplan {

std::vector<Vec3> Obb::vertices() const {
    std::vector<Vec3> v;
    v.reserve(8);
    for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
            for (int sz = -1; sz <= 1; sz += 2)
                v.push_back(center + rot * Vec3{sx * half.x, sy * half.y, sz * half.z});
    return v;
}

void Obb::world_aabb(Vec3& lo, Vec3& hi) const {
    Vec3 extent{
        std::abs(rot.m[0][0]) * half.x + std::abs(rot.m[0][1]) * half.y + std::abs(rot.m[0][2]) * half.z,
        std::abs(rot.m[1][0]) * half.x + std::abs(rot.m[1][1]) * half.y + std::abs(rot.m[1][2]) * half.z,
        std::abs(rot.m[2][0]) * half.x + std::abs(rot.m[2][1]) * half.y + std::abs(rot.m[2][2]) * half.z};
    lo = center - extent;
    hi = center + extent;
}

namespace {

double project_radius(const Obb& box, const Vec3& axis) {
    return box.half.x * std::abs(axis.dot(box.rot.column(0))) +
           box.half.y * std::abs(axis.dot(box.rot.column(1))) +
           box.half.z * std::abs(axis.dot(box.rot.column(2)));
}

struct Face {
    Vec3 center;
    Vec3 normal;          // outward
    std::array<Vec3, 4> verts;
};

// Face of `box` whose outward normal is most aligned with `dir`.
Face face_toward(const Obb& box, const Vec3& dir) {
    int best_axis = 0;
    double best = -2.0;
    double sign = 1.0;
    for (int i = 0; i < 3; ++i) {
        double d = dir.dot(box.rot.column(i));
        if (std::abs(d) > best) {
            best = std::abs(d);
            best_axis = i;
            sign = d >= 0.0 ? 1.0 : -1.0;
        }
    }
    const double h[3] = {box.half.x, box.half.y, box.half.z};
    int u = (best_axis + 1) % 3;
    int v = (best_axis + 2) % 3;
    Face f;
    f.normal = box.rot.column(best_axis) * sign;
    f.center = box.center + f.normal * h[best_axis];
    Vec3 eu = box.rot.column(u) * h[u];
    Vec3 ev = box.rot.column(v) * h[v];
    f.verts = {f.center + eu + ev, f.center - eu + ev, f.center - eu - ev, f.center + eu - ev};
    return f;
}

// Sutherland-Hodgman clip of a polygon against the half-space n.x <= offset.
std::vector<Vec3> clip_halfspace(const std::vector<Vec3>& poly, const Vec3& n, double offset) {
    std::vector<Vec3> out;
    const std::size_t count = poly.size();
    for (std::size_t i = 0; i < count; ++i) {
        const Vec3& cur = poly[i];
        const Vec3& nxt = poly[(i + 1) % count];
        double dc = n.dot(cur) - offset;
        double dn = n.dot(nxt) - offset;
        if (dc <= 0.0) out.push_back(cur);
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0))
            out.push_back(cur + (nxt - cur) * (dc / (dc - dn)));
    }
    return out;
}

// Closest points between the lines p1+s*d1 and p2+t*d2 (unit directions,
// non-parallel), clamped to the segment extents.
void closest_edge_points(const Vec3& p1, const Vec3& d1, double e1, const Vec3& p2, const Vec3& d2,
                         double e2, Vec3& c1, Vec3& c2) {
    Vec3 r = p1 - p2;
    double b = d1.dot(d2);
    double c = d1.dot(r);
    double f = d2.dot(r);
    double denom = 1.0 - b * b;
    double s = denom > 1e-12 ? std::clamp((b * f - c) / denom, -e1, e1) : 0.0;
    double t = std::clamp(b * s + f, -e2, e2);
    c1 = p1 + d1 * s;
    c2 = p2 + d2 * t;
}

}  // namespace

bool box_box_contact(const Obb& a, const Obb& b, double margin, ContactManifold& out) {
    const Vec3 d = b.center - a.center;

    double best_overlap = std::numeric_limits<double>::infinity();
    Vec3 best_axis;
    int best_kind = -1;  // 0 = A face, 1 = B face, 2 = edge-edge
    int best_ea = -1, best_eb = -1;
    const double face_preference = 0.95;

    auto consider = [&](const Vec3& axis, int kind, int ea, int eb) {
        double ra = project_radius(a, axis);
        double rb = project_radius(b, axis);
        double overlap = ra + rb - std::abs(d.dot(axis));
        bool better;
        if (kind == 2)
            better = overlap * 1.0 < best_overlap * face_preference;
        else
            better = overlap < best_overlap;
        if (better) {
            best_overlap = overlap;
            best_axis = axis;
            best_kind = kind;
            best_ea = ea;
            best_eb = eb;
        }
        return overlap;
    };

    for (int i = 0; i < 3; ++i)
        if (consider(a.rot.column(i), 0, -1, -1) < -margin) return false;
    for (int i = 0; i < 3; ++i)
        if (consider(b.rot.column(i), 1, -1, -1) < -margin) return false;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Vec3 axis = a.rot.column(i).cross(b.rot.column(j));
            double len = axis.norm();
            if (len < 1e-9) continue;
            if (consider(axis / len, 2, i, j) < -margin) return false;
        }
    }
    if (best_kind < 0) return false;

    // Normal points from A toward B.
    Vec3 normal = d.dot(best_axis) >= 0.0 ? best_axis : -best_axis;
    out.normal = normal;
    out.points.clear();

    if (best_kind == 2) {
        // Supporting edges along the two axes that generated the separating axis.
        auto support_edge = [](const Obb& box, const Vec3& dir, int axis, Vec3& origin, Vec3& d_out,
                               double& extent) {
            const double h[3] = {box.half.x, box.half.y, box.half.z};
            origin = box.center;
            for (int k = 0; k < 3; ++k) {
                if (k == axis) continue;
                Vec3 col = box.rot.column(k);
                origin += col * (dir.dot(col) >= 0.0 ? h[k] : -h[k]);
            }
            d_out = box.rot.column(axis);
            extent = h[axis];
        };
        Vec3 oa, da, ob, db;
        double ea, eb;
        support_edge(a, normal, best_ea, oa, da, ea);
        support_edge(b, -normal, best_eb, ob, db, eb);
        Vec3 ca, cb;
        closest_edge_points(oa, da, ea, ob, db, eb, ca, cb);
        double gap = (cb - ca).dot(normal);
        if (gap < margin) out.points.push_back({(ca + cb) * 0.5, gap});
    } else {
        const bool ref_is_a = best_kind == 0;
        const Obb& ref = ref_is_a ? a : b;
        const Obb& inc = ref_is_a ? b : a;
        Vec3 ref_out = ref_is_a ? normal : -normal;
        Face ref_face = face_toward(ref, ref_out);
        Face inc_face = face_toward(inc, -ref_out);

        std::vector<Vec3> poly(inc_face.verts.begin(), inc_face.verts.end());
        for (int i = 0; i < 4 && !poly.empty(); ++i) {
            // Side plane through the reference face edge, facing outward.
            Vec3 e0 = ref_face.verts[i];
            Vec3 e1 = ref_face.verts[(i + 1) % 4];
            Vec3 side_n = (e1 - e0).cross(ref_face.normal).normalized();
            // Orient away from the face center.
            if (side_n.dot(e0 - ref_face.center) < 0.0) side_n = -side_n;
            poly = clip_halfspace(poly, side_n, side_n.dot(e0));
        }
        for (const Vec3& p : poly) {
            double gap = (p - ref_face.center).dot(ref_face.normal);
            if (gap < margin)
                out.points.push_back({p - ref_face.normal * (gap * 0.5), gap});
        }
    }
    return !out.points.empty();
}

bool box_ground_contact(const Obb& box, double margin, ContactManifold& out) {
    out.normal = {0.0, 0.0, 1.0};  // ground is body A
    out.points.clear();
    for (const Vec3& v : box.vertices()) {
        if (v.z < margin) out.points.push_back({{v.x, v.y, v.z * 0.5}, v.z});
    }
    return !out.points.empty();
}

}  // namespace blockplan
