#include "blockplan/symplan.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "blockplan/errors.hpp"

namespace blockplan {

SymbolicPlan plan_symbolic(const Scene& stateA, const Scene& stateB, const Assignment& assignment) {
    SupportGraph graph = extract_support_graph(stateB);  // throws on cycles

    struct Move {
        std::string a_id;
        long b_index;
        double base_height;
    };
    std::vector<Move> moves;
    for (const auto& [a_id, b_id] : assignment.pairs) {
        long ai = stateA.index_of(a_id);
        long bi = stateB.index_of(b_id);
        if (ai < 0 || bi < 0)
            throw ValidationError("plan: assignment references unknown block '" +
                                  (ai < 0 ? a_id : b_id) + "'");
        const Block& a = stateA.at(ai);
        const Block& b = stateB.at(bi);
        bool moved = (a.pos - b.pos).norm() > kMoveTolPos ||
                     std::abs(wrap_angle(a.yaw - b.yaw)) > kMoveTolYaw;
        if (moved) moves.push_back({a_id, bi, b.bottom()});
    }

    std::sort(moves.begin(), moves.end(), [](const Move& x, const Move& y) {
        if (x.base_height != y.base_height) return x.base_height < y.base_height;
        return x.a_id < y.a_id;
    });

    SymbolicPlan plan;
    for (const Move& m : moves) {
        plan.moved_blocks.insert(m.a_id);
        Action grasp;
        grasp.kind = Action::Kind::grasp;
        grasp.subject = m.a_id;
        plan.actions.push_back(grasp);

        Action place;
        place.kind = Action::Kind::place;
        place.subject = m.a_id;
        std::vector<long> supporters = graph.supporters_of(m.b_index);
        if (supporters.empty()) {
            place.target_ground = true;
        } else {
            for (long s : supporters) place.target.push_back(graph.nodes[s]);
            std::sort(place.target.begin(), place.target.end());
        }
        plan.actions.push_back(place);
    }
    return plan;
}

std::string plan_to_json_text(const SymbolicPlan& plan) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Action& a : plan.actions) {
        nlohmann::json ja;
        ja["kind"] = a.kind == Action::Kind::grasp ? "grasp" : "place";
        ja["subject"] = a.subject;
        if (a.kind == Action::Kind::place) {
            if (a.target_ground)
                ja["target"] = "ground";
            else
                ja["target"] = a.target;
        }
        arr.push_back(ja);
    }
    return arr.dump(2) + "\n";
}

}  // namespace blockplan
