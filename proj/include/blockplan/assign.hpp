#pragma once

#include <map>
#include <string>

#include "blockplan/scene.hpp"

namespace blockplan {

struct Assignment {
    // A-block id -> B-block id; a color-respecting bijection.
    std::map<std::string, std::string> pairs;
    // Sum of center-to-center Euclidean distances, accumulated over A ids in
    // ascending order (the order matters for bit-exact comparison with oracles).
    double total_distance = 0.0;
};

// Minimum total-Euclidean-distance bijection between the blocks of A and B,
// restricted to identical colors (Hungarian algorithm over the cost matrix
// with a prohibitive sentinel on color mismatches).
Assignment assign_blocks(const Scene& stateA, const Scene& stateB);

}  // namespace blockplan
