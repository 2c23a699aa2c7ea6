#include "cli/run_config.hpp"

#include <omcal/error.hpp>

#include <algorithm>
#include <fstream>

namespace omcal::cli {

using json = nlohmann::json;

const Preset& find_preset(std::string_view name) {
    for (const Preset& p : kPresets)
        if (p.name == name) return p;
    std::string known;
    for (const Preset& p : kPresets) known += (known.empty() ? "" : ", ") + std::string(p.name);
    throw Error(ErrorKind::MalformedConfig, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

Index default_anchor_count(int clusters, Index n) {
    return std::min<Index>(std::max<Index>(30, clusters + 10), n);
}

void apply_preset(RunConfig& config, std::string_view name) {
    const Preset& p = find_preset(name);
    config.preset = std::string(p.name);
    config.anchors = p.anchors;
    config.solver.beta = p.beta;
    config.solver.gamma = p.gamma;
}

std::string_view to_string(AnchorSelector selector) {
    switch (selector) {
    case AnchorSelector::JointKMeans: return "joint";
    case AnchorSelector::PerViewKMeans: return "per-view";
    case AnchorSelector::Random: return "random";
    }
    return "joint";
}

AnchorSelector parse_anchor_selector(std::string_view name) {
    if (name == "joint") return AnchorSelector::JointKMeans;
    if (name == "per-view") return AnchorSelector::PerViewKMeans;
    if (name == "random") return AnchorSelector::Random;
    throw Error(ErrorKind::MalformedConfig,
                "anchor_selector must be one of joint, per-view, random; got '" + std::string(name) + "'");
}

void apply_json(RunConfig& config, const json& patch) {
    if (!patch.is_object()) throw Error(ErrorKind::MalformedConfig, "run config must be a JSON object");
    if (patch.contains("preset")) apply_preset(config, patch.at("preset").get<std::string>());

    for (const auto& [key, value] : patch.items()) {
        try {
            if (key == "preset") continue;
            else if (key == "dataset") config.dataset = value.get<std::string>();
            else if (key == "output") config.output = value.get<std::string>();
            else if (key == "graphs") config.graphs = value.get<std::string>();
            else if (key == "anchors") config.anchors = value.get<Index>();
            else if (key == "neighbors") config.neighbors = value.get<Index>();
            else if (key == "anchor_seed") config.anchor_seed = value.get<std::uint64_t>();
            else if (key == "kmeans_max_iters") config.kmeans_max_iters = value.get<int>();
            else if (key == "anchor_selector") config.anchor_selector = parse_anchor_selector(value.get<std::string>());
            else if (key == "clusters") config.solver.clusters = value.get<int>();
            else if (key == "beta") config.solver.beta = value.get<double>();
            else if (key == "gamma") config.solver.gamma = value.get<double>();
            else if (key == "rel_tol") config.solver.rel_tol = value.get<double>();
            else if (key == "max_iters") config.solver.max_iters = value.get<int>();
            else if (key == "seed") config.solver.seed = value.get<std::uint64_t>();
            else if (key == "qp_max_iters") config.solver.qp_max_iters = value.get<int>();
            else if (key == "qp_tol") config.solver.qp_tol = value.get<double>();
            else if (key == "restarts") config.solver.restarts = value.get<int>();
            else if (key == "single_view") config.single_view = value.get<bool>();
            else if (key == "view") config.view = value.get<int>();
            else if (key == "normalize") config.normalize = value.get<bool>();
            else if (key == "cache_graphs") config.cache_graphs = value.get<bool>();
            else if (key == "save_consensus") config.save_consensus = value.get<bool>();
            else throw Error(ErrorKind::MalformedConfig, "unknown run config key '" + key + "'");
        } catch (const json::exception& e) {
            throw Error(ErrorKind::MalformedConfig, "run config key '" + key + "': " + e.what());
        }
    }
}

RunConfig load_run_config(const std::filesystem::path& file) {
    if (!std::filesystem::exists(file)) throw Error(ErrorKind::MissingFile, file.string() + ": no such file");
    std::ifstream in(file);
    json patch;
    try {
        patch = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedConfig, file.string() + ": " + e.what());
    }
    RunConfig config;
    apply_json(config, patch);
    return config;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["dataset"] = c.dataset.string();
    j["output"] = c.output.string();
    if (!c.graphs.empty()) j["graphs"] = c.graphs.string();
    if (c.preset) j["preset"] = *c.preset;
    j["anchors"] = c.anchors;
    j["neighbors"] = c.neighbors;
    j["anchor_seed"] = c.anchor_seed;
    j["kmeans_max_iters"] = c.kmeans_max_iters;
    j["anchor_selector"] = std::string(to_string(c.anchor_selector));
    j["clusters"] = c.solver.clusters;
    j["beta"] = c.solver.beta;
    j["gamma"] = c.solver.gamma;
    j["rel_tol"] = c.solver.rel_tol;
    j["max_iters"] = c.solver.max_iters;
    j["seed"] = c.solver.seed;
    j["qp_max_iters"] = c.solver.qp_max_iters;
    j["qp_tol"] = c.solver.qp_tol;
    j["restarts"] = c.solver.restarts;
    j["single_view"] = c.single_view;
    j["view"] = c.view;
    j["normalize"] = c.normalize;
    j["cache_graphs"] = c.cache_graphs;
    j["save_consensus"] = c.save_consensus;
    return j;
}

} // namespace omcal::cli
