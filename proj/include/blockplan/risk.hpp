#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockplan/physics.hpp"
#include "blockplan/scene.hpp"

namespace blockplan {

struct RiskEstimate {
    double risk = 0.0;        // fell_count / N
    int N = 0;
    double sigma = 0.0;       // noise level, fraction of per-axis block length
    int fell_count = 0;
    std::uint64_t seed = 0;
    std::vector<char> fell;             // per-trial outcome, index order
    std::vector<double> displacement;   // per-trial max displacement
};

// Gaussian position noise per block and axis with std sigma * (block length
// along that axis). Horizontal offsets are unconstrained; the vertical
// offset is the exact Gaussian conditional on staying above the ground and
// clear of the blocks perturbed before it. Deterministic in seed.
Scene perturb_scene(const Scene& sceneB, double sigma, std::uint64_t seed);

// Fraction of N perturbed forward simulations in which the structure falls.
// Trial i perturbs with seed^i, so parallel fan-out is order-independent.
RiskEstimate estimate_risk(const Scene& sceneB, double sigma, int N, std::uint64_t seed,
                           const SimConfig& config = {}, int jobs = 1);

std::string risk_trials_to_csv(const RiskEstimate& estimate);

}  // namespace blockplan
