#include "blockplan/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "blockplan/assign.hpp"
#include "blockplan/errors.hpp"
#include "blockplan/parallel.hpp"

namespace blockplan {

namespace {

// Minimum-sum-of-squared-accelerations knot sequence from 0 to 1 with K
// intervals and zero boundary velocities (central-difference ghost states).
// Returned values are the normalized positions x_0..x_K; scaling to a real
// segment is affine. The normal equations are pentadiagonal SPD.
std::vector<double> min_accel_knots(int K) {
    std::vector<double> x(K + 1, 0.0);
    x[K] = 1.0;
    const int n = K - 1;  // free knots x_1..x_{K-1}
    if (n <= 0) return x;

    // Acceleration rows over free variables plus a constant term. Boundary
    // accelerations a_0 = 2(x_1 - x_0) and a_K = 2(x_{K-1} - x_K) carry
    // trapezoidal weight 1/2 (sqrt(1/2) on the row); this cancels the O(1/K)
    // boundary error and leaves the peak-speed error at O(1/K^2).
    const double boundary = 2.0 * std::sqrt(0.5);
    struct Row {
        int cols[3];
        double coefs[3];
        int count;
        double constant;
    };
    std::vector<Row> rows;
    rows.reserve(K + 1);
    {
        Row r{{0, 0, 0}, {boundary, 0.0, 0.0}, 1, -boundary * x[0]};
        rows.push_back(r);
    }
    for (int k = 1; k <= K - 1; ++k) {
        Row r{{0, 0, 0}, {0.0, 0.0, 0.0}, 0, 0.0};
        auto add = [&](int knot, double c) {
            if (knot == 0)
                r.constant += c * x[0];
            else if (knot == K)
                r.constant += c * x[K];
            else {
                r.cols[r.count] = knot - 1;
                r.coefs[r.count] = c;
                ++r.count;
            }
        };
        add(k - 1, 1.0);
        add(k, -2.0);
        add(k + 1, 1.0);
        rows.push_back(r);
    }
    {
        Row r{{n - 1, 0, 0}, {boundary, 0.0, 0.0}, 1, -boundary * x[K]};
        rows.push_back(r);
    }

    // Assemble banded normal equations (bandwidth 2).
    const int bw = 2;
    std::vector<std::array<double, 5>> m(n, {0, 0, 0, 0, 0});  // m[i][d+2] = M(i, i+d)
    std::vector<double> rhs(n, 0.0);
    for (const Row& r : rows) {
        for (int a = 0; a < r.count; ++a) {
            rhs[r.cols[a]] -= r.coefs[a] * r.constant;
            for (int b = 0; b < r.count; ++b) {
                int d = r.cols[b] - r.cols[a];
                if (std::abs(d) <= bw) m[r.cols[a]][d + 2] += r.coefs[a] * r.coefs[b];
            }
        }
    }

    // Banded Cholesky M = L L^T, then forward/back substitution.
    std::vector<std::array<double, 3>> lower(n, {0, 0, 0});  // lower[i][d] = L(i, i-2+d)
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - bw); j <= i; ++j) {
            double s = m[i][j - i + 2];
            for (int k = std::max(0, i - bw); k < j; ++k) {
                if (j - k <= bw) s -= lower[i][k - i + 2] * lower[j][k - j + 2];
            }
            if (i == j) {
                if (s <= 0.0) throw Error(Error::Kind::internal, "trajectory: solver breakdown");
                lower[i][2] = std::sqrt(s);
            } else {
                lower[i][j - i + 2] = s / lower[j][2];
            }
        }
    }
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = rhs[i];
        for (int k = std::max(0, i - bw); k < i; ++k) s -= lower[i][k - i + 2] * y[k];
        y[i] = s / lower[i][2];
    }
    std::vector<double> sol(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k <= std::min(n - 1, i + bw); ++k) s -= lower[k][i - k + 2] * sol[k];
        sol[i] = s / lower[i][2];
    }
    for (int i = 0; i < n; ++i) x[i + 1] = sol[i];
    return x;
}

}  // namespace

double Trajectory::peak_speed() const {
    double peak = 0.0;
    for (const TrajectorySample& s : samples) peak = std::max(peak, s.vel.norm());
    return peak;
}

double Trajectory::path_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        len += (samples[i].pos - samples[i - 1].pos).norm();
    return len;
}

Trajectory plan_transport(const Vec3& start, const Vec3& goal, double clearance, double duration,
                          int steps) {
    if (!start.finite() || !goal.finite() || !std::isfinite(clearance) || !std::isfinite(duration))
        throw ValidationError("transport: non-finite input");
    if (steps < 8) throw ValidationError("transport: steps must be >= 8");
    if (!(duration > 0.0)) throw ValidationError("transport: duration must be positive");
    if (clearance < 0.0) throw ValidationError("transport: clearance must be >= 0");

    const Vec3 lift{0.0, 0.0, clearance};
    Trajectory traj;
    traj.duration = duration;
    traj.waypoints = {start, start + lift, goal + lift, goal};

    double seg_len[3];
    double total_len = 0.0;
    for (int s = 0; s < 3; ++s) {
        seg_len[s] = (traj.waypoints[s + 1] - traj.waypoints[s]).norm();
        total_len += seg_len[s];
    }

    if (total_len == 0.0) {
        traj.samples.push_back({0.0, start, Vec3{}});
        traj.samples.push_back({duration, start, Vec3{}});
        return traj;
    }

    // Time and sample budget in proportion to length; null segments get none.
    int seg_steps[3] = {0, 0, 0};
    for (int s = 0; s < 3; ++s) {
        if (seg_len[s] > 0.0)
            seg_steps[s] = std::max(2, static_cast<int>(std::lround(steps * seg_len[s] / total_len)));
    }

    double t_base = 0.0;
    for (int s = 0; s < 3; ++s) {
        if (seg_len[s] == 0.0) continue;
        const Vec3& a = traj.waypoints[s];
        const Vec3& b = traj.waypoints[s + 1];
        const double seg_T = duration * seg_len[s] / total_len;
        const int K = seg_steps[s];
        const double dt = seg_T / K;
        std::vector<double> knots = min_accel_knots(K);

        for (int k = (traj.samples.empty() ? 0 : 1); k <= K; ++k) {
            TrajectorySample sample;
            sample.t = t_base + k * dt;
            sample.pos = a + (b - a) * knots[k];
            if (k == 0 || k == K) {
                sample.vel = Vec3{};
            } else {
                sample.vel = (b - a) * ((knots[k + 1] - knots[k - 1]) / (2.0 * dt));
            }
            traj.samples.push_back(sample);
        }
        t_base += seg_T;
    }
    // Guard against accumulated rounding on the final timestamp.
    traj.samples.back().t = duration;
    return traj;
}

double action_energy(const Trajectory& traj, double mass) {
    if (!(mass > 0.0)) throw ValidationError("energy: mass must be positive");
    double peak = traj.peak_speed();
    return 0.5 * mass * peak * peak;
}

double transport_clearance(const Scene& stateB) {
    double top = 0.0;
    for (const Block& b : stateB.blocks()) top = std::max(top, b.top());
    return top + 1.0;
}

namespace {

double sample_effort_total(const Scene& stateA, const Scene& stateB, double clearance,
                           const EffortParams& params, std::vector<double>* per_action) {
    Assignment assignment = assign_blocks(stateA, stateB);
    SymbolicPlan plan = plan_symbolic(stateA, stateB, assignment);
    double total = 0.0;
    for (const Action& action : plan.actions) {
        if (action.kind != Action::Kind::place) continue;
        const Block& a = stateA.at(stateA.index_of(action.subject));
        const Block& b = stateB.at(stateB.index_of(assignment.pairs.at(action.subject)));
        Trajectory traj = plan_transport(a.pos, b.pos, clearance, params.duration, params.steps);
        double e = action_energy(traj, a.mass);
        if (per_action) per_action->push_back(e);
        total += e;
    }
    return total;
}

}  // namespace

EffortEstimate estimate_effort(const TrialSpec& trial, int M, std::uint64_t seed,
                               const EffortParams& params) {
    if (M < 1) throw ValidationError("effort: M must be >= 1");
    trial.check_feasible();
    const double clearance = transport_clearance(trial.stateB);

    EffortEstimate est;
    est.M = M;

    if (!trial.has_scatter()) {
        double total =
            sample_effort_total(*trial.stateA_scene, trial.stateB, clearance, params,
                                &est.per_action_energy);
        est.total_energy = total;
        est.sample_mean = total;
        est.sample_std = 0.0;
        return est;
    }

    std::vector<double> totals(M, 0.0);
    std::vector<double> first_actions;
    parallel_for(M, params.jobs, [&](std::size_t i) {
        Scene stateA = sample_scattered_state(*trial.stateA_scatter, seed + i);
        totals[i] = sample_effort_total(stateA, trial.stateB, clearance, params,
                                        i == 0 ? &first_actions : nullptr);
    });
    est.per_action_energy = std::move(first_actions);
    est.total_energy = std::accumulate(est.per_action_energy.begin(), est.per_action_energy.end(), 0.0);
    double mean = 0.0;
    for (double t : totals) mean += t;
    mean /= M;
    double var = 0.0;
    for (double t : totals) var += (t - mean) * (t - mean);
    est.sample_mean = mean;
    est.sample_std = std::sqrt(var / M);
    return est;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "time,x,y,z,vx,vy,vz\n";
    char buf[256];
    for (const TrajectorySample& s : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.pos.x,
                      s.pos.y, s.pos.z, s.vel.x, s.vel.y, s.vel.z);
        os << buf;
    }
    return os.str();
}

}  // namespace blockplan
