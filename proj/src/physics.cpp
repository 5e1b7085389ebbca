#include "blockplan/physics.hpp"

#include <algorithm>
#include <cmath>

#include "blockplan/collision.hpp"
#include "blockplan/errors.hpp"

namespace blockplan {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw ValidationError("sim config: dt must be positive");
    if (!(max_sim_time >= dt)) throw ValidationError("sim config: max_sim_time must be >= dt");
    if (!(settle_lin_vel > 0.0 && settle_ang_vel > 0.0 && fall_threshold > 0.0))
        throw ValidationError("sim config: thresholds must be positive");
    if (!(gravity >= 0.0) || !(friction_mu >= 0.0) || !(restitution >= 0.0))
        throw ValidationError("sim config: negative physical constant");
    if (solver_iterations < 1) throw ValidationError("sim config: solver_iterations must be >= 1");
}

namespace {

struct Body {
    Vec3 pos;
    Quat orient;
    Vec3 vel;
    Vec3 omega;
    Vec3 half;
    double mass = 1.0;
    double inv_mass = 1.0;
    Vec3 inv_inertia_body;  // diagonal, body frame
    Mat3 inv_inertia_world;

    Obb obb() const { return {pos, orient.to_matrix(), half}; }

    void refresh_inertia() {
        Mat3 r = orient.to_matrix();
        Mat3 d = Mat3::diagonal(inv_inertia_body.x, inv_inertia_body.y, inv_inertia_body.z);
        inv_inertia_world = r * d * r.transposed();
    }
};

struct Constraint {
    int a = -1;  // -1 = ground
    int b = -1;
    Vec3 normal;  // from A toward B
    Vec3 t1, t2;
    Vec3 point;
    double gap = 0.0;
    double target_vn = 0.0;
    double mass_n = 0.0, mass_t1 = 0.0, mass_t2 = 0.0;
    double acc_n = 0.0, acc_t1 = 0.0, acc_t2 = 0.0;
    Vec3 warm_target;
    Vec3 warm_applied;
};

// Accumulated impulses of the previous step's contacts, matched by position;
// warm starting is what lets tall stacks converge within a few iterations.
struct WarmPoint {
    Vec3 point;
    double acc_n = 0.0, acc_t1 = 0.0, acc_t2 = 0.0;
    bool used = false;
};

Vec3 point_velocity(const Body& body, const Vec3& r) { return body.vel + body.omega.cross(r); }

double effective_mass(const Body* a, const Body* b, const Vec3& ra, const Vec3& rb, const Vec3& dir) {
    double k = 0.0;
    if (a) {
        Vec3 an = ra.cross(dir);
        k += a->inv_mass + an.dot(a->inv_inertia_world * an);
    }
    if (b) {
        Vec3 bn = rb.cross(dir);
        k += b->inv_mass + bn.dot(b->inv_inertia_world * bn);
    }
    return k > 0.0 ? 1.0 / k : 0.0;
}

void apply_impulse(Body* a, Body* b, const Vec3& ra, const Vec3& rb, const Vec3& impulse) {
    if (a) {
        a->vel -= impulse * a->inv_mass;
        a->omega -= a->inv_inertia_world * ra.cross(impulse);
    }
    if (b) {
        b->vel += impulse * b->inv_mass;
        b->omega += b->inv_inertia_world * rb.cross(impulse);
    }
}

}  // namespace

SimOutcome simulate(const Scene& scene, const SimConfig& config) {
    return simulate(scene, config, StepObserver{});
}

SimOutcome simulate(const Scene& scene, const SimConfig& config, const StepObserver& observer) {
    config.validate();
    scene.validate();

    const int n = static_cast<int>(scene.size());
    std::vector<Body> bodies(n);
    for (int i = 0; i < n; ++i) {
        const Block& blk = scene.at(i);
        Body& b = bodies[i];
        b.pos = blk.pos;
        b.orient = Quat::from_yaw(blk.yaw);
        b.half = blk.dims * 0.5;
        b.mass = blk.mass;
        b.inv_mass = 1.0 / blk.mass;
        double ix = blk.mass / 12.0 * (blk.dims.y * blk.dims.y + blk.dims.z * blk.dims.z);
        double iy = blk.mass / 12.0 * (blk.dims.x * blk.dims.x + blk.dims.z * blk.dims.z);
        double iz = blk.mass / 12.0 * (blk.dims.x * blk.dims.x + blk.dims.y * blk.dims.y);
        b.inv_inertia_body = {1.0 / ix, 1.0 / iy, 1.0 / iz};
        b.refresh_inertia();
    }

    auto snapshot = [&]() {
        std::vector<BodyState> states(n);
        for (int i = 0; i < n; ++i)
            states[i] = {bodies[i].pos, bodies[i].orient, bodies[i].vel, bodies[i].omega};
        return states;
    };
    if (observer) observer(0, snapshot());

    const double dt = config.dt;
    const long max_steps = static_cast<long>(std::ceil(config.max_sim_time / dt));
    bool settled = false;
    long step = 0;

    std::vector<Obb> obbs(n);
    std::vector<Vec3> aabb_lo(n), aabb_hi(n);
    std::vector<Constraint> constraints;
    std::map<std::pair<int, int>, std::vector<WarmPoint>> warm_cache;

    for (step = 1; step <= max_steps; ++step) {
        for (Body& b : bodies) {
            b.vel.z -= config.gravity * dt;
            b.refresh_inertia();
        }

        // Speculative margin grows with speed so fast bodies are caught
        // before they cross a surface within one step.
        auto body_margin = [&](const Body& b) {
            double half_diag = b.half.norm();
            return config.contact_margin + (b.vel.norm() + b.omega.norm() * half_diag) * dt;
        };

        constraints.clear();
        for (int i = 0; i < n; ++i) {
            obbs[i] = bodies[i].obb();
            obbs[i].world_aabb(aabb_lo[i], aabb_hi[i]);
        }
        for (int i = 0; i < n; ++i) {
            double margin = body_margin(bodies[i]);
            if (aabb_lo[i].z < margin) {
                ContactManifold m;
                if (box_ground_contact(obbs[i], margin, m)) {
                    for (const ContactPoint& cp : m.points) {
                        Constraint c;
                        c.a = -1;
                        c.b = i;
                        c.normal = m.normal;
                        c.point = cp.point;
                        c.gap = cp.gap;
                        constraints.push_back(c);
                    }
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double margin = std::max(body_margin(bodies[i]), body_margin(bodies[j]));
                bool overlap = aabb_lo[i].x <= aabb_hi[j].x + margin && aabb_lo[j].x <= aabb_hi[i].x + margin &&
                               aabb_lo[i].y <= aabb_hi[j].y + margin && aabb_lo[j].y <= aabb_hi[i].y + margin &&
                               aabb_lo[i].z <= aabb_hi[j].z + margin && aabb_lo[j].z <= aabb_hi[i].z + margin;
                if (!overlap) continue;
                ContactManifold m;
                if (box_box_contact(obbs[i], obbs[j], margin, m)) {
                    for (const ContactPoint& cp : m.points) {
                        Constraint c;
                        c.a = i;
                        c.b = j;
                        c.normal = m.normal;
                        c.point = cp.point;
                        c.gap = cp.gap;
                        constraints.push_back(c);
                    }
                }
            }
        }

        for (Constraint& c : constraints) {
            Body* a = c.a >= 0 ? &bodies[c.a] : nullptr;
            Body* b = c.b >= 0 ? &bodies[c.b] : nullptr;
            Vec3 ra = a ? c.point - a->pos : Vec3{};
            Vec3 rb = b ? c.point - b->pos : Vec3{};

            // Deterministic tangent basis.
            Vec3 ref = std::abs(c.normal.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
            c.t1 = c.normal.cross(ref).normalized();
            c.t2 = c.normal.cross(c.t1);

            c.mass_n = effective_mass(a, b, ra, rb, c.normal);
            c.mass_t1 = effective_mass(a, b, ra, rb, c.t1);
            c.mass_t2 = effective_mass(a, b, ra, rb, c.t2);

            // Approach allowed up to the remaining gap; gentle push-out past slop.
            if (c.gap >= 0.0)
                c.target_vn = -c.gap / dt;
            else if (c.gap < -config.contact_slop)
                c.target_vn = config.pushout_beta * (-c.gap - config.contact_slop) / dt;
            else
                c.target_vn = 0.0;

            if (config.restitution > 0.0) {
                Vec3 v_rel = (b ? point_velocity(*b, rb) : Vec3{}) - (a ? point_velocity(*a, ra) : Vec3{});
                double vn = v_rel.dot(c.normal);
                if (vn < -1.0)  // restitution only for real impacts
                    c.target_vn = std::max(c.target_vn, -config.restitution * vn);
            }

            auto cached = config.warm_start ? warm_cache.find({c.a, c.b}) : warm_cache.end();
            if (cached != warm_cache.end()) {
                WarmPoint* best = nullptr;
                double best_d2 = 0.05 * 0.05;
                for (WarmPoint& wp : cached->second) {
                    if (wp.used) continue;
                    double d2 = (wp.point - c.point).norm2();
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best = &wp;
                    }
                }
                if (best) {
                    best->used = true;
                    c.warm_target = c.normal * best->acc_n + c.t1 * best->acc_t1 +
                                    c.t2 * best->acc_t2;
                }
            }
        }

        // Warm starting is what lets tall stacks converge, but replaying a
        // stale impulse can do positive work on the pair (the load changed
        // since the last step). Each cached impulse is applied only up to
        // its energy-neutral fraction, in a few passes so that neighboring
        // contacts can progressively unlock each other; the work of an
        // impulse s*P is s*(P.v_rel) + s^2/2 * P^T K P <= 0 by construction.
        if (config.warm_start) {
            const int warm_passes = 4;
            for (int pass = 0; pass < warm_passes; ++pass) {
                for (Constraint& c : constraints) {
                    Vec3 remaining = c.warm_target - c.warm_applied;
                    double len = remaining.norm();
                    if (len < 1e-12) continue;
                    Body* a = c.a >= 0 ? &bodies[c.a] : nullptr;
                    Body* b = c.b >= 0 ? &bodies[c.b] : nullptr;
                    Vec3 ra = a ? c.point - a->pos : Vec3{};
                    Vec3 rb = b ? c.point - b->pos : Vec3{};
                    Vec3 v_rel = (b ? point_velocity(*b, rb) : Vec3{}) -
                                 (a ? point_velocity(*a, ra) : Vec3{});
                    double d0 = remaining.dot(v_rel);
                    if (d0 >= 0.0) continue;
                    Vec3 dir = remaining / len;
                    double m_eff = effective_mass(a, b, ra, rb, dir);
                    if (m_eff <= 0.0) continue;
                    double q = 0.5 * len * len / m_eff;
                    double s = std::min(1.0, -d0 / q);
                    Vec3 applied = remaining * s;
                    apply_impulse(a, b, ra, rb, applied);
                    c.warm_applied += applied;
                }
            }
            for (Constraint& c : constraints) {
                c.acc_n = c.warm_applied.dot(c.normal);
                c.acc_t1 = c.warm_applied.dot(c.t1);
                c.acc_t2 = c.warm_applied.dot(c.t2);
            }
        }

        auto solve_constraint = [&](Constraint& c, bool freeze_support) {
            Body* a = c.a >= 0 ? &bodies[c.a] : nullptr;
            Body* b = c.b >= 0 ? &bodies[c.b] : nullptr;
            Vec3 ra = a ? c.point - a->pos : Vec3{};
            Vec3 rb = b ? c.point - b->pos : Vec3{};
            // In a shock pass the supporting side is treated as static: it
            // receives no impulse and contributes no inverse mass. Freezing
            // a supporter that is itself still moving would pump energy into
            // the supported body, so those contacts get a plain iteration.
            Body* ma = a;
            Body* mb = b;
            if (freeze_support) {
                Body* support = c.normal.z >= 0.0 ? a : b;
                const Vec3& rs = c.normal.z >= 0.0 ? ra : rb;
                if (!support || point_velocity(*support, rs).norm() < 1e-3) {
                    if (c.normal.z >= 0.0)
                        ma = nullptr;
                    else
                        mb = nullptr;
                }
            }
            double mass_n = freeze_support ? effective_mass(ma, mb, ra, rb, c.normal) : c.mass_n;
            double mass_t1 = freeze_support ? effective_mass(ma, mb, ra, rb, c.t1) : c.mass_t1;
            double mass_t2 = freeze_support ? effective_mass(ma, mb, ra, rb, c.t2) : c.mass_t2;
            if (mass_n <= 0.0) return;

            Vec3 v_rel = (b ? point_velocity(*b, rb) : Vec3{}) - (a ? point_velocity(*a, ra) : Vec3{});
            double vn = v_rel.dot(c.normal);
            double delta = (c.target_vn - vn) * mass_n;
            if (delta < 0.0) {
                // Impulse removal may slow separation but never speed up an
                // approach (a speculative target below zero would otherwise
                // pump energy into the pair).
                delta = std::max(delta, (std::min(vn, 0.0) - vn) * mass_n);
            }
            double new_acc = std::max(0.0, c.acc_n + delta);
            delta = new_acc - c.acc_n;
            c.acc_n = new_acc;
            if (delta != 0.0) apply_impulse(ma, mb, ra, rb, c.normal * delta);

            // Friction deltas move the tangential velocity toward zero and
            // never past it, even when a shrunken Coulomb limit would force
            // a larger removal; the accumulator tracks what was applied.
            double limit = config.friction_mu * c.acc_n;
            auto friction_axis = [&](const Vec3& t, double mass_t, double& acc) {
                Vec3 vr = (b ? point_velocity(*b, rb) : Vec3{}) -
                          (a ? point_velocity(*a, ra) : Vec3{});
                double vt = vr.dot(t);
                double desired = -vt * mass_t;
                double d = std::clamp(acc + desired, -limit, limit) - acc;
                if (desired >= 0.0)
                    d = std::clamp(d, 0.0, desired);
                else
                    d = std::clamp(d, desired, 0.0);
                acc += d;
                if (d != 0.0) apply_impulse(ma, mb, ra, rb, t * d);
            };
            friction_axis(c.t1, mass_t1, c.acc_t1);
            friction_axis(c.t2, mass_t2, c.acc_t2);
        };

        for (int iter = 0; iter < config.solver_iterations; ++iter)
            for (Constraint& c : constraints) solve_constraint(c, false);

        if (config.shock_passes > 0) {
            std::vector<Constraint*> by_height;
            by_height.reserve(constraints.size());
            for (Constraint& c : constraints) by_height.push_back(&c);
            std::stable_sort(by_height.begin(), by_height.end(),
                             [](const Constraint* x, const Constraint* y) {
                                 return x->point.z < y->point.z;
                             });
            for (int pass = 0; pass < config.shock_passes; ++pass)
                for (Constraint* c : by_height) solve_constraint(*c, true);
        }

        warm_cache.clear();
        for (const Constraint& c : constraints)
            warm_cache[{c.a, c.b}].push_back({c.point, c.acc_n, c.acc_t1, c.acc_t2, false});

        for (Body& b : bodies) {
            b.pos += b.vel * dt;
            Quat omega_q{0.0, b.omega.x, b.omega.y, b.omega.z};
            Quat derivative = omega_q * b.orient;
            Quat next{b.orient.w + 0.5 * dt * derivative.w, b.orient.x + 0.5 * dt * derivative.x,
                      b.orient.y + 0.5 * dt * derivative.y, b.orient.z + 0.5 * dt * derivative.z};
            next = next.normalized();
            // Advect omega with the body: rotational kinetic energy is then
            // exactly conserved during free motion.
            Quat dq = (next * b.orient.conjugate()).normalized();
            b.omega = dq.rotate(b.omega);
            b.orient = next;

            if (!b.pos.finite() || !b.vel.finite() || !b.omega.finite() || !b.orient.finite())
                throw SimulationError("simulation diverged (non-finite state)", step);
        }

        if (observer) observer(step, snapshot());

        settled = true;
        for (const Body& b : bodies) {
            if (b.vel.norm() > config.settle_lin_vel || b.omega.norm() > config.settle_ang_vel) {
                settled = false;
                break;
            }
        }
        if (settled) break;
    }

    SimOutcome outcome;
    outcome.settled = settled;
    outcome.elapsed = std::min(static_cast<double>(step), static_cast<double>(max_steps)) * dt;

    std::vector<Block> final_blocks;
    final_blocks.reserve(n);
    double max_disp = 0.0;
    for (int i = 0; i < n; ++i) {
        Block blk = scene.at(i);
        max_disp = std::max(max_disp, (bodies[i].pos - blk.pos).norm());
        blk.pos = bodies[i].pos;
        blk.yaw = bodies[i].orient.yaw();
        final_blocks.push_back(blk);
    }
    outcome.final = Scene::unchecked(std::move(final_blocks));
    outcome.max_displacement = max_disp;
    outcome.fell = max_disp > config.fall_threshold;
    return outcome;
}

namespace {

struct Rect2 {
    double lo_x, lo_y, hi_x, hi_y;
};

// 2D convex hull (monotone chain). Points are modified in place.
std::vector<Vec3> convex_hull_2d(std::vector<Vec3> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec3& p, const Vec3& q) {
        return p.x != q.x ? p.x < q.x : p.y < q.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec3& p, const Vec3& q) { return p.x == q.x && p.y == q.y; }),
              pts.end());
    const std::size_t m = pts.size();
    if (m < 3) return pts;
    auto cross2 = [](const Vec3& o, const Vec3& p, const Vec3& q) {
        return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    };
    std::vector<Vec3> hull(2 * m);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    std::size_t lower = k + 1;
    for (std::size_t i = m - 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool strictly_inside_hull(const std::vector<Vec3>& hull, double x, double y, double eps) {
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec3& p = hull[i];
        const Vec3& q = hull[(i + 1) % hull.size()];
        double cross = (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
        if (cross <= eps) return false;  // hull is counterclockwise
    }
    return true;
}

}  // namespace

bool static_stable(const Scene& scene) {
    scene.validate();
    const int n = static_cast<int>(scene.size());

    // Axis-aligned footprints only (yaw a multiple of pi/2).
    std::vector<Rect2> feet(n);
    for (int i = 0; i < n; ++i) {
        const Block& b = scene.at(i);
        double q = b.yaw / (M_PI / 2.0);
        long quarter = std::lround(q);
        if (std::abs(q - quarter) > 1e-6)
            throw UnsupportedInputError("static_stable: block '" + b.id +
                                        "' is not axis-aligned (yaw must be a multiple of pi/2)");
        bool swapped = (quarter % 2 + 2) % 2 == 1;
        double hx = (swapped ? b.dims.y : b.dims.x) * 0.5;
        double hy = (swapped ? b.dims.x : b.dims.y) * 0.5;
        feet[i] = {b.pos.x - hx, b.pos.y - hy, b.pos.x + hx, b.pos.y + hy};
    }

    SupportGraph graph = extract_support_graph(scene);

    // Transitive reachability (blocks whose weight bears on each node).
    std::vector<std::vector<bool>> carries(n, std::vector<bool>(n, false));
    std::vector<long> order = graph.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        long v = *it;
        carries[v][v] = true;
        for (long w : graph.supported_by(v))
            for (int k = 0; k < n; ++k)
                if (carries[w][k]) carries[v][k] = true;
    }

    for (int i = 0; i < n; ++i) {
        double mass = 0.0, mx = 0.0, my = 0.0;
        for (int k = 0; k < n; ++k) {
            if (!carries[i][k]) continue;
            const Block& blk = scene.at(k);
            mass += blk.mass;
            mx += blk.mass * blk.pos.x;
            my += blk.mass * blk.pos.y;
        }
        mx /= mass;
        my /= mass;

        std::vector<Vec3> corners;
        if (graph.ground_supported.count(i)) {
            corners.push_back({feet[i].lo_x, feet[i].lo_y, 0});
            corners.push_back({feet[i].hi_x, feet[i].lo_y, 0});
            corners.push_back({feet[i].hi_x, feet[i].hi_y, 0});
            corners.push_back({feet[i].lo_x, feet[i].hi_y, 0});
        }
        for (long s : graph.supporters_of(i)) {
            Rect2 patch{std::max(feet[i].lo_x, feet[s].lo_x), std::max(feet[i].lo_y, feet[s].lo_y),
                        std::min(feet[i].hi_x, feet[s].hi_x), std::min(feet[i].hi_y, feet[s].hi_y)};
            if (patch.lo_x >= patch.hi_x || patch.lo_y >= patch.hi_y) continue;
            corners.push_back({patch.lo_x, patch.lo_y, 0});
            corners.push_back({patch.hi_x, patch.lo_y, 0});
            corners.push_back({patch.hi_x, patch.hi_y, 0});
            corners.push_back({patch.lo_x, patch.hi_y, 0});
        }
        if (corners.empty()) return false;  // unsupported block

        std::vector<Vec3> hull = convex_hull_2d(std::move(corners));
        if (!strictly_inside_hull(hull, mx, my, 1e-9)) return false;
    }
    return true;
}

}  // namespace blockplan
