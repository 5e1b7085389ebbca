#include "blockplan/pipeline.hpp"

#include <string>
#include <vector>

namespace blockplan {

namespace {

// Builders for the reconstructed stimulus geometry. All blocks are unit
// cubes of unit mass unless stated otherwise.

Block cube(const std::string& id, double x, double y, double z, Color color = Color::natural) {
    Block b;
    b.id = id;
    b.pos = {x, y, z};
    b.color = color;
    return b;
}

std::vector<Block> tower(const std::string& prefix, int n, double x, double y, int* counter) {
    std::vector<Block> blocks;
    for (int k = 0; k < n; ++k)
        blocks.push_back(cube(prefix + std::to_string((*counter)++), x, y, 0.5 + k));
    return blocks;
}

std::vector<Block> flat_row(const std::string& prefix, int n, double x0, double y, double spacing,
                            int* counter) {
    std::vector<Block> blocks;
    for (int k = 0; k < n; ++k)
        blocks.push_back(cube(prefix + std::to_string((*counter)++), x0 + k * spacing, y, 0.5));
    return blocks;
}

void append(std::vector<Block>& dst, std::vector<Block> src) {
    for (Block& b : src) dst.push_back(std::move(b));
}

ScatterTemplate scatter(int count, double w, double h, std::vector<Color> colors = {}) {
    ScatterTemplate t;
    t.count = count;
    t.colors = colors.empty() ? std::vector<Color>(count, Color::natural) : std::move(colors);
    t.workspace_w = w;
    t.workspace_h = h;
    return t;
}

TrialSpec make_trial(std::string id, ScatterTemplate a, std::vector<Block> b) {
    TrialSpec t;
    t.id = std::move(id);
    t.stateA_scatter = std::move(a);
    t.stateB = Scene::validated(std::move(b));
    t.check_feasible();
    return t;
}

}  // namespace

std::vector<TrialSpec> bundled_trials() {
    std::vector<TrialSpec> trials;
    const double gap = 1.1;

    {  // Pair 1: 2x2 flat square vs 4-tower.
        int c = 0;
        std::vector<Block> e;
        append(e, flat_row("t", 2, -0.55, -0.55, gap, &c));
        append(e, flat_row("t", 2, -0.55, 0.55, gap, &c));
        trials.push_back(make_trial("1-E", scatter(4, 6, 6), std::move(e)));
        c = 0;
        trials.push_back(make_trial("1-H", scatter(4, 6, 6), tower("t", 4, 0, 0, &c)));
    }
    {  // Pair 2: two flat rows vs two 3-towers.
        int c = 0;
        std::vector<Block> e;
        append(e, flat_row("t", 3, -gap, -1.5, gap, &c));
        append(e, flat_row("t", 3, -gap, 1.5, gap, &c));
        trials.push_back(make_trial("2-E", scatter(6, 7, 7), std::move(e)));
        c = 0;
        std::vector<Block> h;
        append(h, tower("t", 3, -1.5, 0, &c));
        append(h, tower("t", 3, 1.5, 0, &c));
        trials.push_back(make_trial("2-H", scatter(6, 7, 7), std::move(h)));
    }
    {  // Pair 3: 4x2 flat rectangle vs 4-wide 2-high wall.
        int c = 0;
        std::vector<Block> e;
        append(e, flat_row("t", 4, -1.65, -0.55, gap, &c));
        append(e, flat_row("t", 4, -1.65, 0.55, gap, &c));
        trials.push_back(make_trial("3-E", scatter(8, 8, 8), std::move(e)));
        c = 0;
        std::vector<Block> h;
        append(h, flat_row("t", 4, -1.65, 0, gap, &c));
        for (int k = 0; k < 4; ++k) h.push_back(cube("t" + std::to_string(c++), -1.65 + k * gap, 0, 1.5));
        trials.push_back(make_trial("3-H", scatter(8, 8, 8), std::move(h)));
    }
    {  // Pair 4: flat L vs 5-tower.
        int c = 0;
        std::vector<Block> e;
        append(e, flat_row("t", 3, -gap, 0, gap, &c));
        e.push_back(cube("t3", -gap, gap, 0.5));
        e.push_back(cube("t4", -gap, 2 * gap, 0.5));
        trials.push_back(make_trial("4-E", scatter(5, 7, 7), std::move(e)));
        c = 0;
        trials.push_back(make_trial("4-H", scatter(5, 7, 7), tower("t", 5, 0, 0, &c)));
    }
    {  // Pair 5: ten blocks in two flat rows vs two 5-towers.
        int c = 0;
        std::vector<Block> e;
        append(e, flat_row("t", 5, -2.2, -0.55, gap, &c));
        append(e, flat_row("t", 5, -2.2, 0.55, gap, &c));
        trials.push_back(make_trial("5-E", scatter(10, 9, 9), std::move(e)));
        c = 0;
        std::vector<Block> h;
        append(h, tower("t", 5, -2, 0, &c));
        append(h, tower("t", 5, 2, 0, &c));
        trials.push_back(make_trial("5-H", scatter(10, 9, 9), std::move(h)));
    }
    {  // Pair 6: 4x3 flat grid vs three 4-towers.
        int c = 0;
        std::vector<Block> e;
        for (int row = 0; row < 3; ++row)
            append(e, flat_row("t", 4, -1.65, (row - 1) * gap, gap, &c));
        trials.push_back(make_trial("6-E", scatter(12, 9, 9), std::move(e)));
        c = 0;
        std::vector<Block> h;
        append(h, tower("t", 4, -2.5, 0, &c));
        append(h, tower("t", 4, 0, 0, &c));
        append(h, tower("t", 4, 2.5, 0, &c));
        trials.push_back(make_trial("6-H", scatter(12, 9, 9), std::move(h)));
    }
    {  // Pair 7: ten-block line vs ten-block tower.
        int c = 0;
        trials.push_back(make_trial("7-E", scatter(10, 13, 7), flat_row("t", 10, -4.95, 0, gap, &c)));
        c = 0;
        trials.push_back(make_trial("7-H", scatter(10, 13, 7), tower("t", 10, 0, 0, &c)));
    }
    {  // Pair 8: flat hexagon vs three 2-towers.
        int c = 0;
        std::vector<Block> e;
        e.push_back(cube("t0", -1.2, -1.2, 0.5));
        e.push_back(cube("t1", 0, -1.7, 0.5));
        e.push_back(cube("t2", 1.2, -1.2, 0.5));
        e.push_back(cube("t3", 1.2, 1.2, 0.5));
        e.push_back(cube("t4", 0, 1.7, 0.5));
        e.push_back(cube("t5", -1.2, 1.2, 0.5));
        trials.push_back(make_trial("8-E", scatter(6, 7, 7), std::move(e)));
        std::vector<Block> h;
        c = 0;
        append(h, tower("t", 2, -1.5, -1, &c));
        append(h, tower("t", 2, 1.5, -1, &c));
        append(h, tower("t", 2, 0, 1.5, &c));
        trials.push_back(make_trial("8-H", scatter(6, 7, 7), std::move(h)));
    }
    {  // Pair 9: flat square ring vs two-high enclosure walls.
        std::vector<Block> e;
        int c = 0;
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
                if (i == 0 && j == 0) continue;
                e.push_back(cube("t" + std::to_string(c++), i * gap, j * gap, 0.5));
            }
        trials.push_back(make_trial("9-E", scatter(8, 8, 8), std::move(e)));
        std::vector<Block> h;
        c = 0;
        h.push_back(cube("t0", -gap, 0, 0.5));
        h.push_back(cube("t1", gap, 0, 0.5));
        h.push_back(cube("t2", 0, -gap, 0.5));
        h.push_back(cube("t3", 0, gap, 0.5));
        h.push_back(cube("t4", -gap, 0, 1.5));
        h.push_back(cube("t5", gap, 0, 1.5));
        h.push_back(cube("t6", 0, -gap, 1.5));
        h.push_back(cube("t7", 0, gap, 1.5));
        trials.push_back(make_trial("9-H", scatter(8, 8, 8), std::move(h)));
    }
    {  // Pair 10: two 3-towers vs one 6-tower.
        int c = 0;
        std::vector<Block> e;
        append(e, tower("t", 3, -2, 0, &c));
        append(e, tower("t", 3, 2, 0, &c));
        trials.push_back(make_trial("10-E", scatter(6, 7, 7), std::move(e)));
        c = 0;
        trials.push_back(make_trial("10-H", scatter(6, 7, 7), tower("t", 6, 0, 0, &c)));
    }
    {  // Pair 11: identical flat targets, colors grouped vs interleaved.
        std::vector<Color> colors{Color::green, Color::green, Color::green,
                                  Color::yellow, Color::yellow, Color::yellow};
        std::vector<Block> e;
        e.push_back(cube("t0", -gap, -0.55, 0.5, Color::green));
        e.push_back(cube("t1", -gap, 0.55, 0.5, Color::green));
        e.push_back(cube("t2", 0, -0.55, 0.5, Color::green));
        e.push_back(cube("t3", 0, 0.55, 0.5, Color::yellow));
        e.push_back(cube("t4", gap, -0.55, 0.5, Color::yellow));
        e.push_back(cube("t5", gap, 0.55, 0.5, Color::yellow));
        trials.push_back(make_trial("11-E", scatter(6, 7, 7, colors), std::move(e)));
        std::vector<Block> h;
        h.push_back(cube("t0", -gap, -0.55, 0.5, Color::green));
        h.push_back(cube("t1", -gap, 0.55, 0.5, Color::yellow));
        h.push_back(cube("t2", 0, -0.55, 0.5, Color::yellow));
        h.push_back(cube("t3", 0, 0.55, 0.5, Color::green));
        h.push_back(cube("t4", gap, -0.55, 0.5, Color::green));
        h.push_back(cube("t5", gap, 0.55, 0.5, Color::yellow));
        trials.push_back(make_trial("11-H", scatter(6, 7, 7, colors), std::move(h)));
    }
    {  // Pair 12: the bucket trials (fixed array abstraction).
        trials.push_back(sample_bucket_trial(BucketVariant::easy, 2024));
        trials.push_back(sample_bucket_trial(BucketVariant::hard, 2024));
    }
    return trials;
}

}  // namespace blockplan
