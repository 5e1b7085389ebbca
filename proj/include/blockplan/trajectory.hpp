#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockplan/scene.hpp"
#include "blockplan/symplan.hpp"

namespace blockplan {

struct TrajectorySample {
    double t = 0.0;
    Vec3 pos;
    Vec3 vel;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;  // times strictly increasing, 0..duration
    double duration = 0.0;
    std::vector<Vec3> waypoints;

    double peak_speed() const;
    double path_length() const;
};

// Discretized minimizer of the integrated squared acceleration through the
// lift-over waypoints [start, start+z*clearance, goal+z*clearance, goal],
// with zero velocity at every waypoint. Segment times and sample counts are
// split in proportion to segment length, so each rest-to-rest segment
// approaches the closed-form cubic x0 + (x1-x0)(3s^2-2s^3).
Trajectory plan_transport(const Vec3& start, const Vec3& goal, double clearance, double duration,
                          int steps);

// Peak kinetic energy of the carried block: 1/2 * mass * peak_speed^2.
double action_energy(const Trajectory& traj, double mass);

struct EffortParams {
    double duration = 2.0;  // per transport, regardless of distance
    int steps = 128;
    int jobs = 1;
};

struct EffortEstimate {
    std::vector<double> per_action_energy;  // transports of the first sample, plan order
    double total_energy = 0.0;              // sum over per_action_energy
    double sample_mean = 0.0;               // mean total over the M scatter samples
    double sample_std = 0.0;                // population std over samples
    int M = 0;
};

// Runs assign -> plan_symbolic -> per-transport trajectories for each of M
// scatter samples (sample i uses seed+i) and aggregates total kinetic energy.
// A fixed (non-scatter) stateA yields M identical samples and sample_std 0.
EffortEstimate estimate_effort(const TrialSpec& trial, int M, std::uint64_t seed,
                               const EffortParams& params = {});

// Lift height used for transports: tallest structure top in B plus one block length.
double transport_clearance(const Scene& stateB);

std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace blockplan
