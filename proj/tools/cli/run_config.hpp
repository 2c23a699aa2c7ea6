#pragma once

#include <omcal/anchors.hpp>
#include <omcal/solver.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace omcal::cli {

/// Per-dataset (m, beta, gamma) triples used as named presets.
struct Preset {
    std::string_view name;
    Index anchors;
    double beta;
    double gamma;
};

inline constexpr std::array<Preset, 9> kPresets{{
    {"coil", 35, 0.3, 0.01},
    {"wiki", 30, 0.1, 0.1},
    {"usps", 40, 0.3, 0.1},
    {"reuters", 15, 0.8, 0.0001},
    {"noisymnist", 100, 0.2, 1.0},
    {"xmedia", 40, 0.1, 1.0},
    {"cifar10", 35, 1.0, 0.001},
    {"cifar100", 150, 0.4, 0.1},
    {"mnist", 30, 0.2, 0.1},
}};

const Preset& find_preset(std::string_view name);

struct RunConfig {
    std::filesystem::path dataset;
    std::filesystem::path output = "omcal_out";
    std::filesystem::path graphs;  // load cached anchor graphs instead of building
    std::optional<std::string> preset;

    Index anchors = 0;             // 0: max(30, c + 10) capped at n
    Index neighbors = 5;           // clamped to anchors - 1
    std::uint64_t anchor_seed = 0;
    int kmeans_max_iters = 100;
    AnchorSelector anchor_selector = AnchorSelector::JointKMeans;

    SolverConfig solver;           // clusters 0: number of ground-truth classes

    bool single_view = false;
    int view = 0;                  // graph used with single_view
    bool normalize = false;        // per-feature z-score before anchors
    bool cache_graphs = false;     // write <output>/graphs
    bool save_consensus = false;   // write <output>/consensus (initial and learned Z)
};

/// Anchor count used when `anchors` is 0.
Index default_anchor_count(int clusters, Index n);

void apply_preset(RunConfig& config, std::string_view name);

/// Applies the keys of a JSON object. A "preset" key is applied first so the
/// other keys override it. Unknown keys and wrong types throw MalformedConfig.
void apply_json(RunConfig& config, const nlohmann::json& patch);

RunConfig load_run_config(const std::filesystem::path& file);

nlohmann::ordered_json to_json(const RunConfig& config);

std::string_view to_string(AnchorSelector selector);
AnchorSelector parse_anchor_selector(std::string_view name);

} // namespace omcal::cli
