#include "blockplan/assign.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <vector>

#include "blockplan/errors.hpp"

namespace blockplan {

namespace {

// O(n^3) Hungarian algorithm (Kuhn-Munkres with row/column potentials).
// Returns match[row] = column of the minimum-cost perfect matching.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) match[p[j] - 1] = j - 1;
    return match;
}

}  // namespace

Assignment assign_blocks(const Scene& stateA, const Scene& stateB) {
    // Sort by id so the result does not depend on input block ordering.
    std::vector<const Block*> as, bs;
    for (const Block& b : stateA.blocks()) as.push_back(&b);
    for (const Block& b : stateB.blocks()) bs.push_back(&b);
    auto by_id = [](const Block* x, const Block* y) { return x->id < y->id; };
    std::sort(as.begin(), as.end(), by_id);
    std::sort(bs.begin(), bs.end(), by_id);

    std::map<Color, long> ca, cb;
    for (const Block* b : as) ++ca[b->color];
    for (const Block* b : bs) ++cb[b->color];
    if (ca != cb) {
        std::ostringstream os;
        os << "assignment infeasible: color multisets differ:";
        std::set<Color> all;
        for (const auto& [c, k] : ca) all.insert(c);
        for (const auto& [c, k] : cb) all.insert(c);
        for (Color c : all) {
            long na = ca.count(c) ? ca.at(c) : 0;
            long nb = cb.count(c) ? cb.at(c) : 0;
            if (na != nb) os << " " << color_name(c) << " A=" << na << " B=" << nb;
        }
        throw InfeasibleError(os.str());
    }

    const int n = static_cast<int>(as.size());
    Assignment result;
    if (n == 0) return result;

    double max_dist = 0.0;
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            dist[i][j] = (as[i]->pos - bs[j]->pos).norm();
            max_dist = std::max(max_dist, dist[i][j]);
        }
    // Strictly greater than any feasible total, so no mismatched pair is chosen.
    const double sentinel = (max_dist + 1.0) * (n + 1);
    std::vector<std::vector<double>> cost = dist;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (as[i]->color != bs[j]->color) cost[i][j] = sentinel;

    std::vector<int> match = hungarian(cost);

    // Canonicalize exact-cost ties: swap pairs toward the lexicographically
    // smallest pairing whenever the swap leaves the total bit-identical.
    bool changed = true;
    int guard = n * n + 1;
    while (changed && guard-- > 0) {
        changed = false;
        for (int i1 = 0; i1 < n; ++i1) {
            for (int i2 = i1 + 1; i2 < n; ++i2) {
                int j1 = match[i1], j2 = match[i2];
                if (j2 < j1 && cost[i1][j1] + cost[i2][j2] == cost[i1][j2] + cost[i2][j1]) {
                    match[i1] = j2;
                    match[i2] = j1;
                    changed = true;
                }
            }
        }
    }

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        result.pairs[as[i]->id] = bs[match[i]]->id;
        total += dist[i][match[i]];
    }
    result.total_distance = total;
    return result;
}

}  // namespace blockplan
