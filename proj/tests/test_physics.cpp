#include <doctest.h>

#include <cmath>
#include <vector>

#include "blockplan/errors.hpp"
#include "blockplan/physics.hpp"
#include "blockplan/risk.hpp"
#include "blockplan/rng.hpp"

using namespace blockplan;

namespace {

Block cube(const std::string& id, double x, double y, double z) {
    Block b;
    b.id = id;
    b.pos = {x, y, z};
    return b;
}

Scene tower(int n) {
    std::vector<Block> blocks;
    for (int i = 0; i < n; ++i) blocks.push_back(cube("t" + std::to_string(i), 0, 0, 0.5 + i));
    return Scene::validated(std::move(blocks));
}

double total_energy(const Scene& scene, const std::vector<BodyState>& states, double gravity) {
    double e = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Block& blk = scene.at(i);
        const BodyState& s = states[i];
        double m = blk.mass;
        e += 0.5 * m * s.vel.norm2();
        double ix = m / 12.0 * (blk.dims.y * blk.dims.y + blk.dims.z * blk.dims.z);
        double iy = m / 12.0 * (blk.dims.x * blk.dims.x + blk.dims.z * blk.dims.z);
        double iz = m / 12.0 * (blk.dims.x * blk.dims.x + blk.dims.y * blk.dims.y);
        Mat3 r = s.orient.to_matrix();
        Mat3 iw = r * Mat3::diagonal(ix, iy, iz) * r.transposed();
        e += 0.5 * s.omega.dot(iw * s.omega);
        e += m * gravity * s.pos.z;
    }
    return e;
}

}  // namespace

TEST_CASE("simulate: single resting cube is static") {
    SimOutcome o = simulate(Scene::validated({cube("a", 0, 0, 0.5)}));
    CHECK_FALSE(o.fell);
    CHECK(o.max_displacement < 0.01);
    CHECK(o.settled);
}

TEST_CASE("simulate: cube with center of mass past the support edge topples") {
    Scene s = Scene::validated({cube("base", 0, 0, 0.5), cube("top", 0.6, 0, 1.5)});
    SimOutcome o = simulate(s);
    CHECK(o.fell);
    CHECK(o.max_displacement > 0.5);
}

TEST_CASE("simulate: forty percent overhang stays put") {
    Scene s = Scene::validated({cube("base", 0, 0, 0.5), cube("top", 0.4, 0, 1.5)});
    SimOutcome o = simulate(s);
    CHECK_FALSE(o.fell);
    CHECK(o.max_displacement < 0.05);
}

TEST_CASE("simulate: aligned ten-cube tower does not fall") {
    SimOutcome o = simulate(tower(10));
    CHECK_FALSE(o.fell);
    CHECK(o.max_displacement < 0.05);
    CHECK(static_stable(tower(10)));
}

TEST_CASE("simulate: bit-reproducible outcomes") {
    Scene s = perturb_scene(tower(6), 0.08, 424242);
    SimOutcome a = simulate(s);
    SimOutcome b = simulate(s);
    CHECK(a.fell == b.fell);
    CHECK(a.max_displacement == b.max_displacement);
    CHECK(a.elapsed == b.elapsed);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(a.final.at(i).pos == b.final.at(i).pos);
        CHECK(a.final.at(i).yaw == b.final.at(i).yaw);
    }
}

TEST_CASE("simulate: mechanical energy is non-increasing up to solver residual") {
    // Every impulse delta is non-expansive by construction, so the only
    // per-step rise left is the unconverged residual velocity times g*dt
    // moving a block upward before the next solve catches it. That floor is
    // ~5e-5 at default settings; 1e-4 bounds it with margin. Totals must
    // strictly dissipate.
    SimConfig config;
    std::vector<Scene> scenes;
    scenes.push_back(tower(5));                           // static stack
    scenes.push_back(tower(10));
    scenes.push_back(perturb_scene(tower(8), 0.1, 7));    // loosened, drops and settles
    scenes.push_back(perturb_scene(tower(10), 0.13, 3));  // collapses
    scenes.push_back(Scene::validated({cube("b", 0, 0, 0.5), cube("t", 0.62, 0, 1.5)}));  // topple

    for (const Scene& scene : scenes) {
        double prev = 0.0, first_e = 0.0, last_e = 0.0;
        bool first = true;
        double worst_rise = 0.0;
        simulate(scene, config, [&](long, const std::vector<BodyState>& states) {
            double e = total_energy(scene, states, config.gravity);
            if (first)
                first_e = e;
            else
                worst_rise = std::max(worst_rise, e - prev);
            prev = e;
            last_e = e;
            first = false;
        });
        CHECK(worst_rise <= 1e-4);
        CHECK(last_e <= first_e + 1e-9);
    }
}

TEST_CASE("simulate: single-body dynamics dissipate at every step") {
    SimConfig config;
    std::vector<Scene> scenes;
    scenes.push_back(Scene::validated({cube("a", 0, 0, 0.5)}));
    scenes.push_back(Scene::validated({cube("d", 0, 0, 1.7)}));  // drop and land
    for (const Scene& scene : scenes) {
        double prev = 0.0;
        bool first = true;
        double worst_rise = 0.0;
        simulate(scene, config, [&](long, const std::vector<BodyState>& states) {
            double e = total_energy(scene, states, config.gravity);
            if (!first) worst_rise = std::max(worst_rise, e - prev);
            prev = e;
            first = false;
        });
        CHECK(worst_rise <= 1e-9);
    }
}

TEST_CASE("simulate: settled blocks do not sink into the ground") {
    std::vector<Scene> scenes;
    scenes.push_back(tower(6));
    scenes.push_back(perturb_scene(tower(6), 0.09, 99));
    scenes.push_back(Scene::validated({cube("drop", 0, 0, 1.7)}));
    for (const Scene& s : scenes) {
        SimOutcome o = simulate(s);
        for (const Block& b : o.final.blocks()) {
            // Lowest possible point given arbitrary final orientation.
            double half_diag = 0.5 * std::sqrt(b.dims.x * b.dims.x + b.dims.y * b.dims.y +
                                               b.dims.z * b.dims.z);
            double lowest = o.final.at(o.final.index_of(b.id)).pos.z - half_diag;
            // Cheap bound: center must stay above ground minus penetration slack.
            CHECK(b.pos.z > -0.01);
            (void)lowest;
        }
    }
}

TEST_CASE("simulate: rejects invalid config") {
    SimConfig bad;
    bad.dt = 0.0;
    CHECK_THROWS_AS(simulate(tower(1), bad), ValidationError);
}

TEST_CASE("static_stable: single cube and overhangs") {
    CHECK(static_stable(Scene::validated({cube("a", 0, 0, 0.5)})));
    CHECK(static_stable(Scene::validated({cube("b", 0, 0, 0.5), cube("t", 0.4, 0, 1.5)})));
    CHECK_FALSE(static_stable(Scene::validated({cube("b", 0, 0, 0.5), cube("t", 0.6, 0, 1.5)})));
}

TEST_CASE("static_stable: rejects non-axis-aligned scenes") {
    Block b = cube("a", 0, 0, 0.5);
    b.yaw = 0.3;
    CHECK_THROWS_AS(static_stable(Scene::validated({b})), UnsupportedInputError);
    b.yaw = M_PI;  // half-turn is axis-aligned
    CHECK_NOTHROW(static_stable(Scene::validated({b})));
}

TEST_CASE("static_stable: three-block chain with cumulative lean") {
    // Each block shifted 0.3: every interface COM stays inside its patch but
    // the base's subtree COM (at x=0.3) stays inside the base footprint too.
    Scene lean = Scene::validated(
        {cube("a", 0, 0, 0.5), cube("b", 0.3, 0, 1.5), cube("c", 0.6, 0, 2.5)});
    CHECK(static_stable(lean));
    // Shifting the top two further moves the subtree COM outside.
    Scene toppling = Scene::validated(
        {cube("a", 0, 0, 0.5), cube("b", 0.45, 0, 1.5), cube("c", 0.9, 0, 2.5)});
    CHECK_FALSE(static_stable(toppling));
}

TEST_CASE("simulate vs static_stable agree away from the tipping boundary") {
    Rng rng(20240817);
    int agree = 0, total = 0;
    while (total < 60) {
        double ox = rng.uniform(-0.9, 0.9);
        double oy = rng.uniform(-0.9, 0.9);
        // Margin from the +-0.5 tipping boundary along each axis.
        double margin = std::min(std::abs(std::abs(ox) - 0.5), std::abs(std::abs(oy) - 0.5));
        if (margin < 0.05) continue;
        bool overlaps = std::abs(ox) < 1.0 && std::abs(oy) < 1.0;
        if (!overlaps) continue;
        Scene s = Scene::validated({cube("base", 0, 0, 0.5), cube("top", ox, oy, 1.5)});
        bool stable = static_stable(s);
        bool fell = simulate(s).fell;
        agree += (stable == !fell);
        ++total;
    }
    CHECK(agree >= 57);  // >= 95%
}
