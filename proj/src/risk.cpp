#include "blockplan/risk.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "blockplan/errors.hpp"
#include "blockplan/parallel.hpp"
#include "blockplan/rng.hpp"

namespace blockplan {

Scene perturb_scene(const Scene& sceneB, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0 && sigma < 0.5))
        throw ValidationError("perturb: sigma must lie in (0, 0.5)");
    sceneB.validate();

    Rng rng(seed);
    const auto& blocks = sceneB.blocks();
    const int n = static_cast<int>(blocks.size());

    // Blocks are perturbed in scene order. A pair that overlaps vertically
    // in the unperturbed scene (side by side) constrains the horizontal
    // draw, which is rejection-resampled; a pair stacked one above the
    // other constrains the vertical offset, which is drawn from the exact
    // truncated Gaussian (inverse CDF). Joint rejection of whole
    // configurations is intractable for stacked scenes: the vertical
    // offsets would have to come out in near-sorted order.
    const int max_attempts = 10000;
    std::vector<Block> perturbed = blocks;
    auto same_level = [&](int i, int j) {
        return std::min(blocks[i].top(), blocks[j].top()) -
                   std::max(blocks[i].bottom(), blocks[j].bottom()) >
               1e-9;
    };
    for (int k = 0; k < n; ++k) {
        Block& b = perturbed[k];
        const Vec3 base = b.pos;

        Vec3 candidate = base;
        bool placed = false;
        for (int tries = 0; tries < max_attempts && !placed; ++tries) {
            candidate.x = base.x + rng.normal(0.0, sigma * b.dims.x);
            candidate.y = base.y + rng.normal(0.0, sigma * b.dims.y);
            placed = true;
            for (int j = 0; j < k && placed; ++j) {
                if (!same_level(k, j)) continue;
                const Block& other = perturbed[j];
                if (rect_overlap_depth(candidate, b.dims.x * 0.5, b.dims.y * 0.5, b.yaw, other.pos,
                                       other.dims.x * 0.5, other.dims.y * 0.5, other.yaw) > 0.0)
                    placed = false;
            }
        }
        if (!placed)
            throw CapacityError("perturb: block '" + b.id +
                                "' found no clear horizontal placement within 10000 attempts");

        double lo = b.dims.z * 0.5;  // bottom face on or above the ground
        double hi = HUGE_VAL;
        for (int j = 0; j < k; ++j) {
            if (same_level(k, j)) continue;
            const Block& other = perturbed[j];
            double footprint =
                rect_overlap_depth(candidate, b.dims.x * 0.5, b.dims.y * 0.5, b.yaw, other.pos,
                                   other.dims.x * 0.5, other.dims.y * 0.5, other.yaw);
            if (footprint <= 0.0) continue;
            if (base.z >= blocks[j].pos.z)
                lo = std::max(lo, other.top() + b.dims.z * 0.5);
            else
                hi = std::min(hi, other.bottom() - b.dims.z * 0.5);
        }

        if (lo > hi)
            throw CapacityError("perturb: block '" + b.id +
                                "' is over-constrained (no feasible vertical placement)");
        const double sz = sigma * b.dims.z;
        double p_lo = normal_cdf((lo - base.z) / sz);
        double p_hi = hi == HUGE_VAL ? 1.0 : normal_cdf((hi - base.z) / sz);
        double u = p_lo + (p_hi - p_lo) * rng.uniform01();
        u = std::min(std::max(u, 1e-300), 1.0 - 1e-16);
        // Far tails collapse onto the boundary; the clamp also absorbs the
        // quantile's roundoff there.
        candidate.z = std::clamp(base.z + sz * normal_quantile(u), lo, hi);
        b.pos = candidate;
    }
    return Scene::validated(std::move(perturbed));
}

RiskEstimate estimate_risk(const Scene& sceneB, double sigma, int N, std::uint64_t seed,
                           const SimConfig& config, int jobs) {
    if (N < 1) throw ValidationError("risk: N must be >= 1");
    config.validate();

    RiskEstimate est;
    est.N = N;
    est.sigma = sigma;
    est.seed = seed;
    est.fell.assign(N, 0);
    est.displacement.assign(N, 0.0);

    parallel_for(N, jobs, [&](std::size_t i) {
        try {
            Scene perturbed = perturb_scene(sceneB, sigma, seed ^ static_cast<std::uint64_t>(i));
            SimOutcome outcome = simulate(perturbed, config);
            est.fell[i] = outcome.fell ? 1 : 0;
            est.displacement[i] = outcome.max_displacement;
        } catch (const Error& e) {
            throw Error(e.kind(), "risk trial " + std::to_string(i) + ": " + e.what());
        }
    });

    for (int i = 0; i < N; ++i) est.fell_count += est.fell[i];
    est.risk = static_cast<double>(est.fell_count) / N;
    return est;
}

std::string risk_trials_to_csv(const RiskEstimate& estimate) {
    std::ostringstream os;
    os << "trial,fell,max_displacement\n";
    char buf[96];
    for (int i = 0; i < estimate.N; ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", i, estimate.fell[i] ? 1 : 0,
                      estimate.displacement[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace blockplan
