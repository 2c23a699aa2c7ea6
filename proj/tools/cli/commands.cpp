#include "cli/commands.hpp"

#include <omcal/graph_tools.hpp>
#include <omcal/single_view.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace omcal::cli {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool is_monotone(const std::vector<double>& history) {
    for (std::size_t i = 1; i < history.size(); ++i)
        if (history[i] > history[i - 1] + 1e-9 * std::max(1.0, std::abs(history[i - 1]))) return false;
    return true;
}

int resolve_clusters(const RunConfig& config, const std::optional<Labels>& truth) {
    if (config.solver.clusters > 0) return config.solver.clusters;
    if (truth && !truth->empty()) return *std::max_element(truth->begin(), truth->end()) + 1;
    throw Error(ErrorKind::MalformedConfig, "clusters is not set and the dataset has no labels to infer it from");
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, dir.string() + ": " + ec.message());
}

} // namespace

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::MalformedConfig:
        return 2;
    case ErrorKind::NumericalBreakdown:
        return 4;
    default:
        return 3;
    }
}

int worker_count_from_env() {
    const char* raw = std::getenv("OMCAL_WORKERS");
    if (raw == nullptr || *raw == '\0') return 1;
    char* end = nullptr;
    const long value = std::strtol(raw, &end, 10);
    if (*end != '\0' || value < 1 || value > 1024)
        throw Error(ErrorKind::MalformedConfig, std::string("OMCAL_WORKERS must be an integer in [1, 1024], got '") +
                                                    raw + "'");
    return static_cast<int>(value);
}

void print_warnings(const Diagnostics& diag, std::ostream& log) {
    for (const auto& w : diag.warnings()) {
        log << "warning: " << w.message;
        if (w.count > 1) log << " (x" << w.count << ")";
        log << '\n';
    }
}

PreparedGraphs prepare_graphs(const MultiViewDataset& ds, const RunConfig& config, int clusters, Diagnostics* diag) {
    PreparedGraphs out;
    out.m = config.anchors > 0 ? config.anchors : default_anchor_count(clusters, ds.n());
    if (out.m < 2)
        throw Error(ErrorKind::InvalidParameter, "anchors: need at least 2 anchors, got " + std::to_string(out.m));
    if (out.m > ds.n())
        throw Error(ErrorKind::InvalidParameter, "anchors: m = " + std::to_string(out.m) + " exceeds n = " +
                                                     std::to_string(ds.n()));
    if (config.neighbors < 1)
        throw Error(ErrorKind::InvalidParameter, "anchors: neighbors must be >= 1");
    const Index k = clamp_neighbors(config.neighbors, out.m);
    if (k != config.neighbors)
        warn(diag, "anchors: neighbors clamped from " + std::to_string(config.neighbors) + " to " + std::to_string(k));

    const auto start = std::chrono::steady_clock::now();
    const AnchorSet anchors = stage("anchors", [&] {
        return select_anchors(ds, out.m, config.anchor_seed, config.kmeans_max_iters, diag, config.anchor_selector);
    });
    out.graphs = stage("anchors", [&] { return build_all(ds, anchors, k); });
    out.build_seconds = seconds_since(start);
    return out;
}

SolveOutcome solve(const AnchorGraphSet& graphs, const RunConfig& config, int clusters,
                   const std::optional<Labels>& truth) {
    SolverConfig solver = config.solver;
    solver.clusters = clusters;
    SolveOutcome out;
    if (config.single_view) {
        if (config.view < 0 || static_cast<std::size_t>(config.view) >= graphs.view_count())
            throw Error(ErrorKind::InvalidParameter, "single_view: view " + std::to_string(config.view) +
                                                         " out of range (" + std::to_string(graphs.view_count()) +
                                                         " views)");
        out.result = stage("single_view", [&] { return fit_single(graphs.graphs[config.view], solver); });
    } else {
        out.result = stage("solver", [&] { return fit(graphs, solver); });
    }
    if (truth) out.metrics = stage("metrics", [&] { return evaluate(out.result.labels, *truth); });
    return out;
}

FitReport cmd_fit(const RunConfig& config, std::ostream& log) {
    Diagnostics diag;
    std::optional<Labels> truth;
    AnchorGraphSet graphs;
    PreparedGraphs prepared;
    int clusters = 0;

    if (!config.graphs.empty()) {
        GraphCacheInfo info;
        graphs = stage("anchors", [&] { return load_graphs(config.graphs, &info); });
        prepared.m = graphs.m();
        if (!config.dataset.empty()) {
            truth = stage("dataset", [&] { return load_dataset(config.dataset).labels; });
            if (truth && static_cast<Index>(truth->size()) != graphs.n())
                throw Error(ErrorKind::LengthMismatch, "dataset: " + std::to_string(truth->size()) +
                                                           " labels for cached graphs with n = " +
                                                           std::to_string(graphs.n()));
        }
        clusters = resolve_clusters(config, truth);
    } else {
        if (config.dataset.empty()) throw Error(ErrorKind::MalformedConfig, "fit: no dataset given");
        MultiViewDataset ds = stage("dataset", [&] { return load_dataset(config.dataset); });
        if (config.normalize) zscore_normalize(ds);
        truth = ds.labels;
        clusters = resolve_clusters(config, truth);
        prepared = prepare_graphs(ds, config, clusters, &diag);
        graphs = std::move(prepared.graphs);
    }

    SolveOutcome solved = solve(graphs, config, clusters, truth);
    diag.merge(solved.result.diagnostics);
    const ClusteringResult& res = solved.result;

    FitReport report;
    report.n = graphs.n();
    report.views = static_cast<int>(graphs.view_count());
    report.clusters = clusters;
    report.anchors = graphs.m();
    report.neighbors = graphs.k;
    report.beta = config.solver.beta;
    report.gamma = config.solver.gamma;
    report.seed = config.solver.seed;
    report.single_view = config.single_view;
    report.alpha.assign(res.state.alpha.data(), res.state.alpha.data() + res.state.alpha.size());
    report.objective = res.state.objective_history.back();
    report.iterations = res.state.iters_run;
    report.converged = res.converged;
    report.restart_used = res.restart_used;
    report.build_seconds = prepared.build_seconds;
    report.solve_seconds = res.elapsed_seconds;
    report.metrics = solved.metrics;
    for (const auto& w : diag.warnings()) report.warnings.emplace_back(w.message, w.count);

    stage("output", [&] {
        ensure_directory(config.output);
        write_labels(res.labels, config.output / report.labels_file);
        write_file_atomic(config.output / report.convergence_file, convergence_csv(res.state.objective_history));
        if (config.cache_graphs && config.graphs.empty())
            save_graphs(graphs, config.output / "graphs", config.anchor_seed);
        if (config.save_consensus) {
            MultiViewDataset consensus;
            if (config.single_view) {
                consensus.views = {graphs.graphs[config.view], res.state.Z};
            } else {
                const auto views = static_cast<Index>(graphs.view_count());
                consensus.views = {mix_graphs(graphs, Vector::Constant(views, 1.0 / static_cast<double>(views))),
                                   res.state.Z};
            }
            consensus.view_names = {"initial", "learned"};
            save_dataset(consensus, config.output / "consensus", SaveOptions{MatrixFormat::F64le});
        }
        nlohmann::ordered_json j = to_json(report);
        j["config"] = to_json(config);
        write_file_atomic(config.output / "results.json", j.dump(2) + "\n");
    });
    print_warnings(diag, log);
    return report;
}

MetricReport cmd_evaluate(const fs::path& predicted, const fs::path& truth) {
    const Labels pred = stage("evaluate", [&] { return read_labels(predicted); });
    const Labels gold = stage("evaluate", [&] { return read_labels(truth); });
    return stage("metrics", [&] { return evaluate(pred, gold); });
}

Index cmd_reconstruct_graph(const ReconstructOptions& options, std::ostream& log) {
    if (options.input.empty() == options.matrix.empty())
        throw Error(ErrorKind::MalformedConfig, "reconstruct-graph: give exactly one of --input and --matrix");
    if (options.output.empty()) throw Error(ErrorKind::MalformedConfig, "reconstruct-graph: no output path");
    if (options.top_k < 0) throw Error(ErrorKind::InvalidParameter, "reconstruct-graph: top_k must be >= 0");

    Matrix S = stage("reconstruct-graph", [&] {
        if (!options.matrix.empty()) return read_matrix_csv(options.matrix);
        MultiViewDataset ds = load_dataset(options.input);
        if (options.view < 0 || static_cast<std::size_t>(options.view) >= ds.view_count())
            throw Error(ErrorKind::InvalidParameter, options.input.string() + ": view " +
                                                         std::to_string(options.view) + " out of range (" +
                                                         std::to_string(ds.view_count()) + " views)");
        return std::move(ds.views[static_cast<std::size_t>(options.view)]);
    });

    Index negatives = 0;
    double most_negative = 0.0;
    if (!options.strict) {
        for (Index j = 0; j < S.cols(); ++j)
            for (Index i = 0; i < S.rows(); ++i)
                if (S(i, j) < 0.0) {
                    ++negatives;
                    most_negative = std::min(most_negative, S(i, j));
                    S(i, j) = 0.0;
                }
    }

    Diagnostics diag;
    if (negatives > 0)
        diag.warn("reconstruct-graph: clipped " + std::to_string(negatives) + " negative entries to 0 (min " +
                  format_number(most_negative) + ")");

    stage("graph_tools", [&] {
        if (options.top_k > 0) {
            const auto entries = reconstruct_full_graph_topk(S, options.top_k, &diag);
            std::string text = "row,col,value\n";
            for (const auto& e : entries)
                text += std::to_string(e.row) + "," + std::to_string(e.col) + "," + format_number(e.value) + "\n";
            write_file_atomic(options.output, text);
        } else {
            const FullGraph full = reconstruct_full_graph(S, &diag);
            if (options.output.extension() == ".f64")
                write_matrix_f64le(full.B, options.output);
            else
                write_matrix_csv(full.B, options.output);
        }
    });
    print_warnings(diag, log);
    return negatives;
}

std::vector<BenchmarkRow> cmd_benchmark(const BenchmarkOptions& options, std::ostream& log) {
    if (options.sizes.empty()) throw Error(ErrorKind::MalformedConfig, "benchmark: no sizes given");
    if (options.views < 1) throw Error(ErrorKind::InvalidParameter, "benchmark: views must be >= 1");
    std::vector<BenchmarkRow> rows;
    for (Index n : options.sizes) {
        BlobsParams params;
        params.n = n;
        params.clusters = options.clusters;
        params.dims.assign(static_cast<std::size_t>(options.views), options.dims);
        params.separation = options.separation;
        params.noise = options.noise;
        params.seed = options.seed;
        const MultiViewDataset ds = stage("benchmark", [&] { return synth_blobs(params); });

        SolverConfig solver = options.solver;
        solver.clusters = options.clusters;
        Diagnostics diag;

        const auto start = std::chrono::steady_clock::now();
        const AnchorSet anchors =
            stage("anchors", [&] { return select_anchors(ds, options.anchors, options.seed, 100, &diag); });
        const AnchorGraphSet graphs =
            stage("anchors", [&] { return build_all(ds, anchors, clamp_neighbors(options.neighbors, options.anchors)); });
        const double build = seconds_since(start);
        const auto solve_start = std::chrono::steady_clock::now();
        const ClusteringResult res = stage("solver", [&] { return fit(graphs, solver); });
        const double solve_seconds = seconds_since(solve_start);

        BenchmarkRow row;
        row.n = n;
        row.build_seconds = build;
        row.solve_seconds = solve_seconds;
        row.total_seconds = build + solve_seconds;
        row.iterations = res.state.iters_run;
        row.kmeans_iterations = anchors.kmeans_iterations.empty() ? 0 : anchors.kmeans_iterations.front();
        rows.push_back(row);
        log << "n=" << n << " build=" << format_number(build) << "s solve=" << format_number(solve_seconds)
            << "s iterations=" << row.iterations << '\n';
        diag.merge(res.diagnostics);
        print_warnings(diag, log);
    }
    if (!options.output.empty()) stage("output", [&] { write_file_atomic(options.output, benchmark_csv(rows)); });
    return rows;
}

std::vector<SweepCell> cmd_sweep(const SweepGrid& grid, const RunConfig& config, int workers, std::ostream& log) {
    if (grid.anchors.empty() || grid.betas.empty() || grid.gammas.empty())
        throw Error(ErrorKind::MalformedConfig, "sweep: every grid axis needs at least one value");
    if (workers < 1) throw Error(ErrorKind::InvalidParameter, "sweep: workers must be >= 1");
    if (config.dataset.empty()) throw Error(ErrorKind::MalformedConfig, "sweep: no dataset given");

    MultiViewDataset ds = stage("dataset", [&] { return load_dataset(config.dataset); });
    if (config.normalize) zscore_normalize(ds);
    const int clusters = resolve_clusters(config, ds.labels);

    // Graphs depend on m only; build each once. A failed build fails its cells.
    std::vector<std::optional<AnchorGraphSet>> graphs(grid.anchors.size());
    std::vector<std::string> build_errors(grid.anchors.size());
    for (std::size_t a = 0; a < grid.anchors.size(); ++a) {
        RunConfig cell_config = config;
        cell_config.anchors = grid.anchors[a];
        try {
            graphs[a] = prepare_graphs(ds, cell_config, clusters).graphs;
        } catch (const Error& e) {
            build_errors[a] = e.what();
        }
    }

    std::vector<SweepCell> cells;
    std::vector<std::size_t> anchor_slot;
    for (std::size_t a = 0; a < grid.anchors.size(); ++a)
        for (double beta : grid.betas)
            for (double gamma : grid.gammas) {
                SweepCell c;
                c.anchors = grid.anchors[a];
                c.beta = beta;
                c.gamma = gamma;
                cells.push_back(c);
                anchor_slot.push_back(a);
            }

    const fs::path cell_dir = config.output / "cells";
    stage("output", [&] { ensure_directory(cell_dir); });

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            SweepCell& cell = cells[i];
            const std::size_t a = anchor_slot[i];
            const auto start = std::chrono::steady_clock::now();
            if (!graphs[a]) {
                cell.error = build_errors[a];
            } else try {
                RunConfig cell_config = config;
                cell_config.anchors = cell.anchors;
                cell_config.solver.beta = cell.beta;
                cell_config.solver.gamma = cell.gamma;
                const SolveOutcome out = solve(*graphs[a], cell_config, clusters, ds.labels);
                const auto& history = out.result.state.objective_history;
                cell.ok = true;
                cell.metrics = out.metrics;
                cell.objective = history.back();
                cell.iterations = out.result.state.iters_run;
                cell.converged = out.result.converged;
                cell.monotone = is_monotone(history);
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cell.seconds = seconds_since(start);

            nlohmann::ordered_json j;
            j["anchors"] = cell.anchors;
            j["beta"] = cell.beta;
            j["gamma"] = cell.gamma;
            j["status"] = cell.ok ? "ok" : "failed";
            j["metrics"] = cell.metrics ? to_json(*cell.metrics) : nlohmann::ordered_json(nullptr);
            j["objective"] = cell.objective;
            j["iterations"] = cell.iterations;
            j["converged"] = cell.converged;
            j["monotone"] = cell.monotone;
            j["seconds"] = cell.seconds;
            j["error"] = cell.error;
            try {
                write_file_atomic(cell_dir / ("cell_" + std::to_string(i) + ".json"), j.dump(2) + "\n");
            } catch (const Error& e) {
                std::lock_guard lock(log_mutex);
                log << "warning: sweep: " << e.what() << '\n';
            }
            std::lock_guard lock(log_mutex);
            log << "cell " << i << " m=" << cell.anchors << " beta=" << format_number(cell.beta)
                << " gamma=" << format_number(cell.gamma) << ": " << (cell.ok ? "ok" : cell.error) << '\n';
        }
    };

    const int pool = std::min<int>(workers, static_cast<int>(cells.size()));
    if (pool <= 1) {
        work();
    } else {
        std::vector<std::jthread> threads;
        for (int t = 0; t < pool; ++t) threads.emplace_back(work);
    }

    stage("output", [&] { write_file_atomic(config.output / "sweep.csv", sweep_csv(cells)); });
    return cells;
}

void cmd_synth(const BlobsParams& params, const fs::path& root, MatrixFormat format) {
    const MultiViewDataset ds = stage("synth", [&] { return synth_blobs(params); });
    stage("output", [&] { save_dataset(ds, root, SaveOptions{format}); });
}

} // namespace omcal::cli
