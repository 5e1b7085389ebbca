#pragma once

#include <set>
#include <string>
#include <vector>

#include "blockplan/assign.hpp"
#include "blockplan/scene.hpp"

namespace blockplan {

struct Action {
    enum class Kind { grasp, place };
    Kind kind = Kind::grasp;
    std::string subject;               // A-frame block id
    std::vector<std::string> target;   // Place only: B-frame supporter ids
    bool target_ground = false;        // Place only: rests directly on the ground
};

struct SymbolicPlan {
    std::vector<Action> actions;       // alternating Grasp(b), Place(b, .)
    std::set<std::string> moved_blocks;
};

// Pose deltas below these thresholds count as "already in place".
inline constexpr double kMoveTolPos = 0.05;
inline constexpr double kMoveTolYaw = 0.05;

// Grasp/Place sequence that builds stateB bottom-up: moved blocks ordered by
// ascending target base height (a topological order of B's support graph),
// ties broken by A-block id.
SymbolicPlan plan_symbolic(const Scene& stateA, const Scene& stateB, const Assignment& assignment);

std::string plan_to_json_text(const SymbolicPlan& plan);

}  // namespace blockplan
