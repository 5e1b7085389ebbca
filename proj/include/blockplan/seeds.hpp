#pragma once

#include <bit>
#include <cstdint>

#include "blockplan/rng.hpp"

namespace blockplan {

// Shared per-trial seed schedule. The pipeline and the sigma grid search use
// the same derivations, so a table produced at a given (seed, sigma) is
// bit-identical to the grid search row recomputed at that sigma.
inline std::uint64_t effort_seed_for(std::uint64_t seed, std::size_t trial_index) {
    return derive_seed(seed, 0xEFF0000000000000ULL ^ trial_index);
}

inline std::uint64_t risk_seed_for(std::uint64_t seed, std::size_t trial_index, double sigma) {
    std::uint64_t sigma_bits = std::bit_cast<std::uint64_t>(sigma);
    return derive_seed(derive_seed(seed, sigma_bits), 0x0515000000000000ULL ^ trial_index);
}

}  // namespace blockplan
