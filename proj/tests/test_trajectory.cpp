#include <doctest.h>

#include <cmath>
#include <vector>

#include "blockplan/errors.hpp"
#include "blockplan/trajectory.hpp"

using namespace blockplan;

namespace {

Block cube(const std::string& id, double x, double y, double z, Color color = Color::natural) {
    Block b;
    b.id = id;
    b.pos = {x, y, z};
    b.color = color;
    return b;
}

}  // namespace

TEST_CASE("transport: null move has zero length and zero velocities") {
    Trajectory t = plan_transport({1, 2, 0.5}, {1, 2, 0.5}, 0.0, 2.0, 64);
    CHECK(t.path_length() == 0.0);
    CHECK(t.peak_speed() == 0.0);
    CHECK(t.samples.front().t == 0.0);
    CHECK(t.samples.back().t == 2.0);
}

TEST_CASE("transport: single segment peak speed matches the cubic closed form") {
    // Rest-to-rest minimum-acceleration profile: peak speed 1.5 L / T.
    const double L = 3.0, T = 2.0;
    Trajectory t = plan_transport({0, 0, 0}, {L, 0, 0}, 0.0, T, 256);
    double expected = 1.5 * L / T;
    CHECK(std::abs(t.peak_speed() - expected) / expected < 1e-4);
}

TEST_CASE("transport: discretization error strictly decreases over doublings") {
    const double L = 3.0, T = 2.0;
    double expected = 1.5 * L / T;
    double prev_err = 1e9;
    for (int steps : {256, 512, 1024, 2048}) {
        Trajectory t = plan_transport({0, 0, 0}, {L, 0, 0}, 0.0, T, steps);
        double err = std::abs(t.peak_speed() - expected);
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("transport: doubling duration halves peak speed") {
    Trajectory t1 = plan_transport({0, 0, 0}, {2, 1, 0}, 0.5, 2.0, 128);
    Trajectory t2 = plan_transport({0, 0, 0}, {2, 1, 0}, 0.5, 4.0, 128);
    CHECK(t2.peak_speed() == doctest::Approx(0.5 * t1.peak_speed()).epsilon(1e-6));
}

TEST_CASE("transport: waypoints are interpolated and endpoints are at rest") {
    Vec3 start{0, 0, 0.5}, goal{4, -2, 1.5};
    double clearance = 3.0;
    Trajectory t = plan_transport(start, goal, clearance, 2.0, 128);
    REQUIRE(t.waypoints.size() == 4);

    for (const Vec3& wp : t.waypoints) {
        double best = 1e9;
        for (const TrajectorySample& s : t.samples) best = std::min(best, (s.pos - wp).norm());
        CHECK(best < 1e-6);
    }
    CHECK(t.samples.front().vel.norm() <= 1e-9);
    CHECK(t.samples.back().vel.norm() <= 1e-9);

    for (std::size_t i = 1; i < t.samples.size(); ++i)
        CHECK(t.samples[i].t > t.samples[i - 1].t);
    CHECK(t.samples.front().t == 0.0);
    CHECK(t.samples.back().t == doctest::Approx(2.0));
}

TEST_CASE("transport: input validation") {
    CHECK_THROWS_AS(plan_transport({0, 0, 0}, {1, 0, 0}, 0.0, 2.0, 4), ValidationError);
    CHECK_THROWS_AS(plan_transport({0, 0, 0}, {1, 0, 0}, -1.0, 2.0, 64), ValidationError);
    CHECK_THROWS_AS(plan_transport({0, 0, 0}, {1, 0, 0}, 0.0, 0.0, 64), ValidationError);
    double nan = std::nan("");
    CHECK_THROWS_AS(plan_transport({nan, 0, 0}, {1, 0, 0}, 0.0, 2.0, 64), ValidationError);
}

TEST_CASE("energy: closed-form value for a known segment") {
    // L=3, T=2, m=1: 0.5 * (1.5*3/2)^2 = 2.53125.
    Trajectory t = plan_transport({0, 0, 0}, {3, 0, 0}, 0.0, 2.0, 256);
    double e = action_energy(t, 1.0);
    CHECK(e == doctest::Approx(2.53125).epsilon(3e-4));

    CHECK(action_energy(t, 2.0) == doctest::Approx(2.0 * e));

    Trajectory null_move = plan_transport({1, 1, 1}, {1, 1, 1}, 0.0, 2.0, 64);
    CHECK(action_energy(null_move, 1.0) == 0.0);
}

TEST_CASE("effort: A equals B gives zero mean effort") {
    TrialSpec trial;
    trial.id = "same";
    Scene s = Scene::validated({cube("a", 0, 0, 0.5), cube("b", 2, 0, 0.5)});
    trial.stateA_scene = s;
    trial.stateB = s;
    EffortEstimate est = estimate_effort(trial, 30, 5);
    CHECK(est.sample_mean == 0.0);
    CHECK(est.sample_std == 0.0);
    CHECK(est.per_action_energy.empty());
}

TEST_CASE("effort: fixed state A gives zero sample variance") {
    TrialSpec trial;
    trial.id = "fixed";
    trial.stateA_scene = Scene::validated({cube("a", 4, 4, 0.5), cube("b", -4, 2, 0.5)});
    trial.stateB = Scene::validated({cube("t0", 0, 0, 0.5), cube("t1", 0, 0, 1.5)});
    EffortEstimate est = estimate_effort(trial, 30, 5);
    CHECK(est.M == 30);
    CHECK(est.sample_std == 0.0);
    CHECK(est.sample_mean > 0.0);
    CHECK(est.sample_mean == doctest::Approx(est.total_energy));
    CHECK(est.per_action_energy.size() == 2);
}

TEST_CASE("effort: scatter sampling is deterministic and parallel-consistent") {
    TrialSpec trial;
    trial.id = "scatter";
    ScatterTemplate t;
    t.count = 5;
    t.colors.assign(5, Color::natural);
    t.workspace_w = 8;
    t.workspace_h = 8;
    trial.stateA_scatter = t;
    std::vector<Block> targets;
    for (int i = 0; i < 5; ++i) targets.push_back(cube("t" + std::to_string(i), 0, 0, 0.5 + i));
    trial.stateB = Scene::validated(std::move(targets));

    EffortParams serial;
    serial.jobs = 1;
    EffortParams parallel;
    parallel.jobs = 4;
    EffortEstimate a = estimate_effort(trial, 8, 123, serial);
    EffortEstimate b = estimate_effort(trial, 8, 123, parallel);
    CHECK(a.sample_mean == b.sample_mean);
    CHECK(a.sample_std == b.sample_std);
    CHECK(a.sample_std > 0.0);
}

TEST_CASE("effort: additive over disjoint sub-trials") {
    // Two spatially separated fixed sub-trials; the union's effort is the sum.
    auto make = [](double offset, const std::string& prefix) {
        std::pair<std::vector<Block>, std::vector<Block>> result;
        result.first = {cube(prefix + "a", offset + 3, 0, 0.5), cube(prefix + "b", offset - 3, 1, 0.5)};
        result.second = {cube(prefix + "t0", offset, 0, 0.5), cube(prefix + "t1", offset, 0, 1.5)};
        return result;
    };
    auto part1 = make(0, "p");
    auto part2 = make(40, "q");

    auto effort_of = [](std::vector<Block> a, std::vector<Block> b) {
        TrialSpec trial;
        trial.id = "t";
        trial.stateA_scene = Scene::validated(std::move(a));
        trial.stateB = Scene::validated(std::move(b));
        return estimate_effort(trial, 1, 0).sample_mean;
    };
    double e1 = effort_of(part1.first, part1.second);
    double e2 = effort_of(part2.first, part2.second);

    std::vector<Block> a_union = part1.first;
    for (const Block& b : part2.first) a_union.push_back(b);
    std::vector<Block> b_union = part1.second;
    for (const Block& b : part2.second) b_union.push_back(b);
    double e_union = effort_of(a_union, b_union);
    CHECK(e_union == doctest::Approx(e1 + e2).epsilon(1e-6));
}

TEST_CASE("trajectory csv trace has the expected columns") {
    Trajectory t = plan_transport({0, 0, 0}, {1, 0, 0}, 0.0, 1.0, 16);
    std::string csv = trajectory_to_csv(t);
    CHECK(csv.rfind("time,x,y,z,vx,vy,vz\n", 0) == 0);
}
