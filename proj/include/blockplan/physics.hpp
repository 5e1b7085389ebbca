#pragma once

#include <functional>
#include <vector>

#include "blockplan/scene.hpp"

namespace blockplan {

struct SimConfig {
    double dt = 1.0 / 240.0;
    double gravity = 9.81;
    double friction_mu = 0.5;
    double restitution = 0.0;
    double max_sim_time = 4.0;
    double settle_lin_vel = 1e-3;
    double settle_ang_vel = 1e-3;
    double fall_threshold = 0.25;  // max block displacement that still counts as standing

    // Solver knobs. The defaults favor strict per-step energy dissipation
    // (every impulse delta is individually non-expansive); warm starting is
    // an opt-in speedup that converges tall stacks in far fewer iterations
    // but can do positive transient work when contact loads shift.
    int solver_iterations = 320;
    bool warm_start = false;
    int shock_passes = 0;
    double contact_margin = 0.02;  // speculative contact distance, grown with approach speed
    double contact_slop = 0.005;   // penetration tolerated before push-out
    double pushout_beta = 0.0;

    void validate() const;
};

struct SimOutcome {
    Scene final;
    bool fell = false;
    double max_displacement = 0.0;
    double elapsed = 0.0;
    bool settled = false;
};

struct BodyState {
    Vec3 pos;
    Quat orient;
    Vec3 vel;
    Vec3 omega;
};

using StepObserver = std::function<void(long step, const std::vector<BodyState>&)>;

// Semi-implicit rigid-box integration with impulse contacts (speculative
// margin, restitution 0 by default, Coulomb friction). Deterministic for
// identical inputs. Terminates when every body drops below the settle
// velocity thresholds or at max_sim_time.
SimOutcome simulate(const Scene& scene, const SimConfig& config = {});
SimOutcome simulate(const Scene& scene, const SimConfig& config, const StepObserver& observer);

// Quasi-static stability of an axis-aligned scene: every block subtree's
// aggregate center of mass must project strictly inside the convex hull of
// the block's support contacts. Conservative (exact for chain stacks);
// intended as an independent cross-check on simulate.
bool static_stable(const Scene& scene);

}  // namespace blockplan
