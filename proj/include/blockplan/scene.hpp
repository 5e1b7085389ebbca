#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blockplan/geometry.hpp"

namespace blockplan {

// All lengths are block-units (the canonical cube has edge 1 per axis),
// masses are unit-block masses.
inline constexpr double kContactTol = 0.02;

enum class Color { natural, red, blue, green, yellow };

const char* color_name(Color c);
std::optional<Color> parse_color(const std::string& name);

struct Block {
    std::string id;
    Vec3 dims{1.0, 1.0, 1.0};  // full extents, strictly positive
    Vec3 pos;                  // box center
    double yaw = 0.0;          // rotation about the vertical axis
    Color color = Color::natural;
    double mass = 1.0;

    double bottom() const { return pos.z - dims.z * 0.5; }
    double top() const { return pos.z + dims.z * 0.5; }
};

// A full world state: yaw-rotated boxes above the ground half-space z <= 0.
class Scene {
public:
    Scene() = default;

    // Validates ids, dimensions, interpenetration and ground containment.
    static Scene validated(std::vector<Block> blocks, double tol = kContactTol);
    // For simulator outputs, which may legitimately rest outside tolerances.
    static Scene unchecked(std::vector<Block> blocks);

    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    const Block& at(std::size_t i) const { return blocks_[i]; }
    // Index of a block id, or -1.
    long index_of(const std::string& id) const;

    void validate(double tol = kContactTol) const;

private:
    std::vector<Block> blocks_;
};

struct SupportGraph {
    std::vector<std::string> nodes;                      // block ids, scene order
    std::vector<std::pair<long, long>> edges;            // supporter -> supported, indices
    std::set<long> ground_supported;                     // indices resting on the ground

    std::vector<long> supporters_of(long node) const;
    std::vector<long> supported_by(long node) const;
    // Indices in dependency order (supporters first). Throws on cycles.
    std::vector<long> topological_order() const;
};

// Edge (i -> j) iff the top face of i is within tol of the bottom face of j
// and their horizontal footprints overlap with positive area.
SupportGraph extract_support_graph(const Scene& scene, double tol = kContactTol);

struct ScatterTemplate {
    int count = 0;
    std::vector<Color> colors;     // one per block
    double workspace_w = 0.0;      // rectangle centered on the origin
    double workspace_h = 0.0;
};

struct TrialSpec {
    std::string id;
    std::optional<Scene> stateA_scene;            // exactly one of these is set
    std::optional<ScatterTemplate> stateA_scatter;
    Scene stateB;

    bool has_scatter() const { return stateA_scatter.has_value(); }
    // Throws InfeasibleError when the color multisets of A and B differ.
    void check_feasible() const;
};

// Unit cubes dropped flat on the ground, uniform position and yaw over the
// workspace, rejection-sampled against footprint overlap. Pure in (template, seed).
Scene sample_scattered_state(const ScatterTemplate& tmpl, std::uint64_t seed);

enum class BucketVariant { easy, hard };

// The 10x2 array abstraction of the bucket task: 20 blocks in a fixed grid,
// 5 random ones carry the variant color and are transported to a bucket row.
TrialSpec sample_bucket_trial(BucketVariant variant, std::uint64_t seed);

// UTF-8 JSON scene/trial files; unknown fields are rejected.
Scene load_scene(const std::string& path);
Scene scene_from_json_text(const std::string& text, const std::string& origin);
std::string scene_to_json_text(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

TrialSpec trial_from_json_text(const std::string& text, const std::string& origin);
std::string trial_to_json_text(const TrialSpec& trial);
std::vector<TrialSpec> load_trials(const std::string& path);
void save_trials(const std::vector<TrialSpec>& trials, const std::string& path);

}  // namespace blockplan
