#include "blockplan/scene.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "blockplan/errors.hpp"
#include "blockplan/rng.hpp"

namespace blockplan {

using nlohmann::json;

const char* color_name(Color c) {
    switch (c) {
        case Color::natural: return "natural";
        case Color::red: return "red";
        case Color::blue: return "blue";
        case Color::green: return "green";
        case Color::yellow: return "yellow";
    }
    return "natural";
}

std::optional<Color> parse_color(const std::string& name) {
    if (name == "natural") return Color::natural;
    if (name == "red") return Color::red;
    if (name == "blue") return Color::blue;
    if (name == "green") return Color::green;
    if (name == "yellow") return Color::yellow;
    return std::nullopt;
}

Scene Scene::validated(std::vector<Block> blocks, double tol) {
    Scene s;
    s.blocks_ = std::move(blocks);
    s.validate(tol);
    return s;
}

Scene Scene::unchecked(std::vector<Block> blocks) {
    Scene s;
    s.blocks_ = std::move(blocks);
    return s;
}

long Scene::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].id == id) return static_cast<long>(i);
    return -1;
}

void Scene::validate(double tol) const {
    std::set<std::string> seen;
    for (const Block& b : blocks_) {
        if (b.id.empty())
            throw ValidationError("scene: block with empty id");
        if (!seen.insert(b.id).second)
            throw ValidationError("scene: duplicate block id '" + b.id + "'");
        if (!(b.dims.x > 0.0 && b.dims.y > 0.0 && b.dims.z > 0.0))
            throw ValidationError("scene: block '" + b.id + "' has non-positive dims");
        if (!(b.mass > 0.0))
            throw ValidationError("scene: block '" + b.id + "' has non-positive mass");
        if (!b.pos.finite() || !b.dims.finite() || !std::isfinite(b.yaw) || !std::isfinite(b.mass))
            throw ValidationError("scene: block '" + b.id + "' has non-finite fields");
        if (b.bottom() < -tol)
            throw ValidationError("scene: block '" + b.id + "' extends below the ground plane");
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks_.size(); ++j) {
            const Block& a = blocks_[i];
            const Block& b = blocks_[j];
            double depth = upright_box_overlap_depth(a.pos, a.dims, a.yaw, b.pos, b.dims, b.yaw);
            if (depth > tol)
                throw ValidationError("scene: blocks '" + a.id + "' and '" + b.id +
                                      "' interpenetrate");
        }
    }
}

std::vector<long> SupportGraph::supporters_of(long node) const {
    std::vector<long> r;
    for (const auto& [from, to] : edges)
        if (to == node) r.push_back(from);
    return r;
}

std::vector<long> SupportGraph::supported_by(long node) const {
    std::vector<long> r;
    for (const auto& [from, to] : edges)
        if (from == node) r.push_back(to);
    return r;
}

std::vector<long> SupportGraph::topological_order() const {
    const long n = static_cast<long>(nodes.size());
    std::vector<long> indegree(n, 0);
    std::vector<std::vector<long>> out(n);
    for (const auto& [from, to] : edges) {
        ++indegree[to];
        out[from].push_back(to);
    }
    std::vector<long> ready;
    for (long i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::vector<long> order;
    order.reserve(n);
    while (!ready.empty()) {
        // Smallest index first keeps the order deterministic.
        auto it = std::min_element(ready.begin(), ready.end());
        long v = *it;
        ready.erase(it);
        order.push_back(v);
        for (long w : out[v])
            if (--indegree[w] == 0) ready.push_back(w);
    }
    if (static_cast<long>(order.size()) != n)
        throw ValidationError("support graph: cycle detected");
    return order;
}

SupportGraph extract_support_graph(const Scene& scene, double tol) {
    if (!(tol > 0.0)) throw ValidationError("support graph: tol must be positive");
    SupportGraph g;
    for (const Block& b : scene.blocks()) g.nodes.push_back(b.id);
    const auto& blocks = scene.blocks();
    const long n = static_cast<long>(blocks.size());
    for (long i = 0; i < n; ++i) {
        if (std::abs(blocks[i].bottom()) <= tol) g.ground_supported.insert(i);
        for (long j = 0; j < n; ++j) {
            if (i == j) continue;
            if (std::abs(blocks[i].top() - blocks[j].bottom()) > tol) continue;
            const Block& a = blocks[i];
            const Block& b = blocks[j];
            double footprint = rect_overlap_depth(a.pos, a.dims.x * 0.5, a.dims.y * 0.5, a.yaw,
                                                  b.pos, b.dims.x * 0.5, b.dims.y * 0.5, b.yaw);
            if (footprint > 1e-9) g.edges.emplace_back(i, j);
        }
    }
    g.topological_order();  // cycle check
    return g;
}

void TrialSpec::check_feasible() const {
    std::map<Color, long> a_colors;
    if (stateA_scene) {
        for (const Block& b : stateA_scene->blocks()) ++a_colors[b.color];
    } else if (stateA_scatter) {
        if (static_cast<long>(stateA_scatter->colors.size()) != stateA_scatter->count)
            throw ValidationError("trial '" + id + "': scatter colors must list one color per block");
        for (Color c : stateA_scatter->colors) ++a_colors[c];
    } else {
        throw ValidationError("trial '" + id + "': stateA missing");
    }
    std::map<Color, long> b_colors;
    for (const Block& b : stateB.blocks()) ++b_colors[b.color];
    if (a_colors != b_colors) {
        std::ostringstream os;
        os << "trial '" << id << "': color multisets of A and B differ:";
        std::set<Color> all;
        for (const auto& [c, k] : a_colors) all.insert(c);
        for (const auto& [c, k] : b_colors) all.insert(c);
        for (Color c : all) {
            long ca = a_colors.count(c) ? a_colors.at(c) : 0;
            long cb = b_colors.count(c) ? b_colors.at(c) : 0;
            if (ca != cb) os << " " << color_name(c) << " A=" << ca << " B=" << cb;
        }
        throw InfeasibleError(os.str());
    }
}

Scene sample_scattered_state(const ScatterTemplate& tmpl, std::uint64_t seed) {
    if (tmpl.count < 0)
        throw ValidationError("scatter: negative block count");
    if (static_cast<long>(tmpl.colors.size()) != tmpl.count)
        throw ValidationError("scatter: colors must list one color per block");
    if (tmpl.count > 0 && !(tmpl.workspace_w > 0.0 && tmpl.workspace_h > 0.0))
        throw ValidationError("scatter: workspace must be positive");

    Rng rng(seed);
    std::vector<Block> placed;
    placed.reserve(tmpl.count);
    const int max_attempts_per_block = 1000;
    for (int i = 0; i < tmpl.count; ++i) {
        Block b;
        b.id = "b" + std::to_string(i);
        b.color = tmpl.colors[i];
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts_per_block; ++attempt) {
            b.pos = {rng.uniform(-tmpl.workspace_w * 0.5, tmpl.workspace_w * 0.5),
                     rng.uniform(-tmpl.workspace_h * 0.5, tmpl.workspace_h * 0.5),
                     b.dims.z * 0.5};
            b.yaw = rng.uniform(0.0, 2.0 * M_PI);
            bool overlap = false;
            for (const Block& other : placed) {
                if (rect_overlap_depth(b.pos, b.dims.x * 0.5, b.dims.y * 0.5, b.yaw, other.pos,
                                       other.dims.x * 0.5, other.dims.y * 0.5, other.yaw) > 0.0) {
                    overlap = true;
                    break;
                }
            }
            if (!overlap) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw CapacityError("scatter: workspace too small to place block " +
                                std::to_string(i + 1) + " of " + std::to_string(tmpl.count));
        placed.push_back(b);
    }
    return Scene::validated(std::move(placed));
}

TrialSpec sample_bucket_trial(BucketVariant variant, std::uint64_t seed) {
    const Color target_color = variant == BucketVariant::easy ? Color::blue : Color::red;
    Rng rng(derive_seed(seed, variant == BucketVariant::easy ? 0 : 1));

    // Which 5 of the 20 grid slots carry the target color (partial Fisher-Yates).
    std::vector<int> slots(20);
    for (int i = 0; i < 20; ++i) slots[i] = i;
    for (int i = 0; i < 5; ++i) {
        int j = i + static_cast<int>(rng.uniform_index(20 - i));
        std::swap(slots[i], slots[j]);
    }
    std::set<int> colored(slots.begin(), slots.begin() + 5);

    const double spacing = 1.2;
    auto grid_pos = [&](int slot) {
        int col = slot % 10, row = slot / 10;
        return Vec3{(col - 4.5) * spacing, (row - 0.5) * spacing, 0.5};
    };

    std::vector<Block> a_blocks;
    for (int slot = 0; slot < 20; ++slot) {
        Block b;
        b.id = "b" + std::to_string(slot);
        b.pos = grid_pos(slot);
        b.color = colored.count(slot) ? target_color : Color::natural;
        a_blocks.push_back(b);
    }

    // Target: the 5 colored blocks in a row at the bucket zone, the rest in
    // place. The hard variant's bucket sits farther from the array; under
    // the array abstraction that distance is what distinguishes the pair.
    const double bucket_y = variant == BucketVariant::easy ? 4.0 : 6.5;
    std::vector<Block> b_blocks;
    int placed = 0;
    for (int slot = 0; slot < 20; ++slot) {
        Block b = a_blocks[slot];
        b.id = "t" + std::to_string(slot);
        if (colored.count(slot)) {
            b.pos = Vec3{(placed - 2) * spacing, bucket_y, 0.5};
            ++placed;
        }
        b_blocks.push_back(b);
    }

    TrialSpec trial;
    trial.id = variant == BucketVariant::easy ? "12-E" : "12-H";
    trial.stateA_scene = Scene::validated(std::move(a_blocks));
    trial.stateB = Scene::validated(std::move(b_blocks));
    trial.check_feasible();
    return trial;
}

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& where) {
    for (const char* key : required)
        if (!obj.contains(key))
            throw ParseError(where + ": missing field '" + key + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : required)
            if (it.key() == key) known = true;
        for (const char* key : optional)
            if (it.key() == key) known = true;
        if (!known)
            throw ParseError(where + ": unknown field '" + it.key() + "'");
    }
}

Vec3 parse_vec3(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.size() != 3)
        throw ParseError(where + ": expected an array of 3 numbers");
    for (const auto& v : arr)
        if (!v.is_number())
            throw ParseError(where + ": expected an array of 3 numbers");
    return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

Block parse_block(const json& jb, const std::string& origin) {
    if (!jb.is_object()) throw ParseError(origin + ": block entry must be an object");
    require_keys(jb, {"id", "dims", "pos"}, {"yaw", "color", "mass"}, origin + ": block");
    Block b;
    if (!jb["id"].is_string()) throw ParseError(origin + ": block id must be a string");
    b.id = jb["id"].get<std::string>();
    b.dims = parse_vec3(jb["dims"], origin + ": block '" + b.id + "' dims");
    b.pos = parse_vec3(jb["pos"], origin + ": block '" + b.id + "' pos");
    if (jb.contains("yaw")) {
        if (!jb["yaw"].is_number()) throw ParseError(origin + ": block '" + b.id + "' yaw must be a number");
        b.yaw = jb["yaw"].get<double>();
    }
    if (jb.contains("color")) {
        if (!jb["color"].is_string()) throw ParseError(origin + ": block '" + b.id + "' color must be a string");
        auto c = parse_color(jb["color"].get<std::string>());
        if (!c) throw ParseError(origin + ": block '" + b.id + "' has unknown color '" +
                                 jb["color"].get<std::string>() + "'");
        b.color = *c;
    }
    if (jb.contains("mass")) {
        if (!jb["mass"].is_number()) throw ParseError(origin + ": block '" + b.id + "' mass must be a number");
        b.mass = jb["mass"].get<double>();
    }
    return b;
}

Scene parse_scene(const json& js, const std::string& origin) {
    if (!js.is_object()) throw ParseError(origin + ": scene must be an object");
    require_keys(js, {"blocks"}, {}, origin + ": scene");
    if (!js["blocks"].is_array()) throw ParseError(origin + ": 'blocks' must be an array");
    std::vector<Block> blocks;
    for (const auto& jb : js["blocks"]) blocks.push_back(parse_block(jb, origin));
    return Scene::validated(std::move(blocks));
}

ScatterTemplate parse_scatter(const json& js, const std::string& origin) {
    require_keys(js, {"scatter"}, {}, origin + ": stateA");
    const json& sc = js["scatter"];
    if (!sc.is_object()) throw ParseError(origin + ": 'scatter' must be an object");
    require_keys(sc, {"count", "colors", "workspace"}, {}, origin + ": scatter");
    ScatterTemplate t;
    if (!sc["count"].is_number_integer()) throw ParseError(origin + ": scatter count must be an integer");
    t.count = sc["count"].get<int>();
    if (!sc["colors"].is_array()) throw ParseError(origin + ": scatter colors must be an array");
    for (const auto& jc : sc["colors"]) {
        if (!jc.is_string()) throw ParseError(origin + ": scatter colors must be strings");
        auto c = parse_color(jc.get<std::string>());
        if (!c) throw ParseError(origin + ": unknown scatter color '" + jc.get<std::string>() + "'");
        t.colors.push_back(*c);
    }
    if (!sc["workspace"].is_array() || sc["workspace"].size() != 2 ||
        !sc["workspace"][0].is_number() || !sc["workspace"][1].is_number())
        throw ParseError(origin + ": scatter workspace must be [w,h]");
    t.workspace_w = sc["workspace"][0].get<double>();
    t.workspace_h = sc["workspace"][1].get<double>();
    return t;
}

json block_to_json(const Block& b) {
    json jb;
    jb["id"] = b.id;
    jb["dims"] = {b.dims.x, b.dims.y, b.dims.z};
    jb["pos"] = {b.pos.x, b.pos.y, b.pos.z};
    jb["yaw"] = b.yaw;
    jb["color"] = color_name(b.color);
    jb["mass"] = b.mass;
    return jb;
}

json scene_to_json(const Scene& scene) {
    json js;
    js["blocks"] = json::array();
    for (const Block& b : scene.blocks()) js["blocks"].push_back(block_to_json(b));
    return js;
}

TrialSpec parse_trial(const json& jt, const std::string& origin) {
    if (!jt.is_object()) throw ParseError(origin + ": trial must be an object");
    require_keys(jt, {"id", "stateA", "stateB"}, {}, origin + ": trial");
    TrialSpec t;
    if (!jt["id"].is_string()) throw ParseError(origin + ": trial id must be a string");
    t.id = jt["id"].get<std::string>();
    const json& a = jt["stateA"];
    if (a.is_object() && a.contains("scatter"))
        t.stateA_scatter = parse_scatter(a, origin + ": trial '" + t.id + "'");
    else
        t.stateA_scene = parse_scene(a, origin + ": trial '" + t.id + "' stateA");
    t.stateB = parse_scene(jt["stateB"], origin + ": trial '" + t.id + "' stateB");
    t.check_feasible();
    return t;
}

json trial_to_json(const TrialSpec& t) {
    json jt;
    jt["id"] = t.id;
    if (t.stateA_scatter) {
        json sc;
        sc["count"] = t.stateA_scatter->count;
        sc["colors"] = json::array();
        for (Color c : t.stateA_scatter->colors) sc["colors"].push_back(color_name(c));
        sc["workspace"] = {t.stateA_scatter->workspace_w, t.stateA_scatter->workspace_h};
        jt["stateA"] = json{{"scatter", sc}};
    } else {
        jt["stateA"] = scene_to_json(*t.stateA_scene);
    }
    jt["stateB"] = scene_to_json(t.stateB);
    return jt;
}

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return j;
}

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace

Scene load_scene(const std::string& path) { return parse_scene(parse_json_file(path), path); }

Scene scene_from_json_text(const std::string& text, const std::string& origin) {
    return parse_scene(parse_json_text(text, origin), origin);
}

std::string scene_to_json_text(const Scene& scene) { return scene_to_json(scene).dump(2) + "\n"; }

void save_scene(const Scene& scene, const std::string& path) {
    write_text_file(path, scene_to_json_text(scene));
}

TrialSpec trial_from_json_text(const std::string& text, const std::string& origin) {
    return parse_trial(parse_json_text(text, origin), origin);
}

std::string trial_to_json_text(const TrialSpec& trial) { return trial_to_json(trial).dump(2) + "\n"; }

std::vector<TrialSpec> load_trials(const std::string& path) {
    json j = parse_json_file(path);
    std::vector<TrialSpec> trials;
    if (j.is_array()) {
        for (const auto& jt : j) trials.push_back(parse_trial(jt, path));
    } else {
        trials.push_back(parse_trial(j, path));
    }
    std::set<std::string> ids;
    for (const TrialSpec& t : trials)
        if (!ids.insert(t.id).second)
            throw ValidationError(path + ": duplicate trial id '" + t.id + "'");
    return trials;
}

void save_trials(const std::vector<TrialSpec>& trials, const std::string& path) {
    json arr = json::array();
    for (const TrialSpec& t : trials) arr.push_back(trial_to_json(t));
    write_text_file(path, arr.dump(2) + "\n");
}

}  // namespace blockplan
