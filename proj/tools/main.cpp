#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace omcal;
using namespace omcal::cli;

// Values given on the command line; unset ones leave the config file (or
// preset) value alone.
struct FitFlags {
    std::string config_file;
    std::optional<std::string> preset, dataset, output, graphs, selector;
    std::optional<Index> anchors, neighbors;
    std::optional<std::uint64_t> anchor_seed, seed;
    std::optional<int> clusters, max_iters, restarts, view, kmeans_max_iters;
    std::optional<double> beta, gamma, tol;
    bool single_view = false, normalize = false, cache_graphs = false, save_consensus = false;
};

void add_run_flags(CLI::App& cmd, FitFlags& f) {
    cmd.add_option("--config", f.config_file, "JSON run config; flags override its values")->check(CLI::ExistingFile);
    cmd.add_option("--preset", f.preset, "named (m, beta, gamma) preset, e.g. coil");
    cmd.add_option("--dataset,-d", f.dataset, "dataset directory (meta.json layout)");
    cmd.add_option("--out,-o", f.output, "output directory");
    cmd.add_option("--graphs", f.graphs, "load cached anchor graphs instead of building them");
    cmd.add_option("--anchors,-m", f.anchors, "number of anchors m (default max(30, c + 10))");
    cmd.add_option("--neighbors,-k", f.neighbors, "nearest anchors per sample (default 5)");
    cmd.add_option("--anchor-seed", f.anchor_seed, "seed of anchor selection");
    cmd.add_option("--anchor-selector", f.selector, "joint, per-view or random");
    cmd.add_option("--kmeans-iters", f.kmeans_max_iters, "Lloyd iteration cap");
    cmd.add_option("--clusters,-c", f.clusters, "number of clusters (default: classes in labels)");
    cmd.add_option("--beta", f.beta, "nuclear-norm weight");
    cmd.add_option("--gamma", f.gamma, "factorization weight");
    cmd.add_option("--tol", f.tol, "relative objective change that stops the solver");
    cmd.add_option("--max-iters", f.max_iters, "cycle cap");
    cmd.add_option("--seed", f.seed, "solver seed");
    cmd.add_option("--restarts", f.restarts, "independent initializations; lowest objective wins");
    cmd.add_flag("--normalize", f.normalize, "z-score every feature before anchor selection");
}

RunConfig resolve(const FitFlags& f) {
    RunConfig c = f.config_file.empty() ? RunConfig{} : load_run_config(f.config_file);
    if (f.preset) apply_preset(c, *f.preset);
    if (f.dataset) c.dataset = *f.dataset;
    if (f.output) c.output = *f.output;
    if (f.graphs) c.graphs = *f.graphs;
    if (f.anchors) c.anchors = *f.anchors;
    if (f.neighbors) c.neighbors = *f.neighbors;
    if (f.anchor_seed) c.anchor_seed = *f.anchor_seed;
    if (f.selector) c.anchor_selector = parse_anchor_selector(*f.selector);
    if (f.kmeans_max_iters) c.kmeans_max_iters = *f.kmeans_max_iters;
    if (f.clusters) c.solver.clusters = *f.clusters;
    if (f.beta) c.solver.beta = *f.beta;
    if (f.gamma) c.solver.gamma = *f.gamma;
    if (f.tol) c.solver.rel_tol = *f.tol;
    if (f.max_iters) c.solver.max_iters = *f.max_iters;
    if (f.seed) c.solver.seed = *f.seed;
    if (f.restarts) c.solver.restarts = *f.restarts;
    if (f.view) c.view = *f.view;
    if (f.single_view) c.single_view = true;
    if (f.normalize) c.normalize = true;
    if (f.cache_graphs) c.cache_graphs = true;
    if (f.save_consensus) c.save_consensus = true;
    return c;
}

MatrixFormat parse_format(const std::string& name) {
    if (name == "csv") return MatrixFormat::Csv;
    if (name == "f64le") return MatrixFormat::F64le;
    throw Error(ErrorKind::MalformedConfig, "format must be csv or f64le, got '" + name + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-view clustering with adaptive low-rank anchor graphs"};
    app.require_subcommand(1);

    FitFlags fit_flags;
    auto* fit = app.add_subcommand("fit", "cluster a dataset; writes labels.txt, results.json, convergence.csv");
    add_run_flags(*fit, fit_flags);
    fit->add_flag("--single-view", fit_flags.single_view, "cluster one view's anchor graph only");
    fit->add_option("--view", fit_flags.view, "view used by --single-view (default 0)");
    fit->add_flag("--cache-graphs", fit_flags.cache_graphs, "store the anchor graphs under <out>/graphs");
    fit->add_flag("--save-consensus", fit_flags.save_consensus,
                  "store the initial and learned consensus graphs under <out>/consensus");

    std::string pred_file, truth_file;
    auto* eval = app.add_subcommand("evaluate", "score predicted labels against ground truth (JSON on stdout)");
    eval->add_option("--pred,-p", pred_file, "predicted labels")->required();
    eval->add_option("--truth,-t", truth_file, "ground-truth labels")->required();

    ReconstructOptions rec;
    auto* recon = app.add_subcommand("reconstruct-graph", "full n x n graph S D^-1 S^T of an anchor graph");
    auto* rec_input = recon->add_option("--input,-i", rec.input, "directory in dataset layout (graphs/, consensus/)");
    recon->add_option("--matrix", rec.matrix, "a single CSV anchor graph")->excludes(rec_input);
    recon->add_option("--view", rec.view, "matrix of --input to use (default 0)");
    recon->add_option("--out,-o", rec.output, "output file (.csv or .f64 dense, CSV triplets with --top-k)")
        ->required();
    recon->add_option("--top-k", rec.top_k, "keep the k largest entries per row");
    recon->add_flag("--strict", rec.strict, "reject negative entries instead of clipping them to 0");

    BenchmarkOptions bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "time anchor construction and solving on synthetic data");
    bench_cmd->add_option("--sizes", bench.sizes, "sample counts, comma separated")->delimiter(',')->required();
    bench_cmd->add_option("--clusters,-c", bench.clusters, "clusters");
    bench_cmd->add_option("--anchors,-m", bench.anchors, "anchors");
    bench_cmd->add_option("--dims", bench.dims, "features per view");
    bench_cmd->add_option("--views", bench.views, "views");
    bench_cmd->add_option("--neighbors,-k", bench.neighbors, "nearest anchors per sample");
    bench_cmd->add_option("--separation", bench.separation, "cluster center scale");
    bench_cmd->add_option("--noise", bench.noise, "noise standard deviation");
    bench_cmd->add_option("--seed", bench.seed, "data, anchor and solver seed");
    bench_cmd->add_option("--beta", bench.solver.beta, "nuclear-norm weight");
    bench_cmd->add_option("--gamma", bench.solver.gamma, "factorization weight");
    bench_cmd->add_option("--max-iters", bench.solver.max_iters, "cycle cap");
    bench_cmd->add_option("--out,-o", bench.output, "CSV report");

    FitFlags sweep_flags;
    SweepGrid grid;
    auto* sweep = app.add_subcommand("sweep", "grid over (m, beta, gamma); one fit per cell. Pool size: OMCAL_WORKERS");
    add_run_flags(*sweep, sweep_flags);
    sweep->add_option("--grid-anchors", grid.anchors, "anchor counts")->delimiter(',')->required();
    sweep->add_option("--grid-beta", grid.betas, "beta values")->delimiter(',')->required();
    sweep->add_option("--grid-gamma", grid.gammas, "gamma values")->delimiter(',')->required();

    BlobsParams blobs;
    std::string synth_out, synth_format = "csv";
    auto* synth = app.add_subcommand("synth", "write a synthetic Gaussian-blob dataset");
    synth->add_option("--out,-o", synth_out, "dataset directory")->required();
    synth->add_option("--n", blobs.n, "samples");
    synth->add_option("--clusters,-c", blobs.clusters, "clusters");
    synth->add_option("--dims", blobs.dims, "features per view, comma separated")->delimiter(',');
    synth->add_option("--separation", blobs.separation, "cluster center scale");
    synth->add_option("--noise", blobs.noise, "noise standard deviation");
    synth->add_option("--seed", blobs.seed, "seed");
    synth->add_option("--format", synth_format, "csv or f64le");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit) {
            const FitReport report = cmd_fit(resolve(fit_flags), std::cerr);
            nlohmann::ordered_json summary;
            summary["objective"] = report.objective;
            summary["iterations"] = report.iterations;
            summary["converged"] = report.converged;
            summary["alpha"] = report.alpha;
            if (report.metrics) summary["metrics"] = to_json(*report.metrics);
            std::cout << summary.dump(2) << '\n';
        } else if (*eval) {
            std::cout << to_json(cmd_evaluate(pred_file, truth_file)).dump(2) << '\n';
        } else if (*recon) {
            cmd_reconstruct_graph(rec, std::cerr);
        } else if (*bench_cmd) {
            const auto rows = cmd_benchmark(bench, std::cerr);
            if (bench.output.empty()) std::cout << benchmark_csv(rows);
        } else if (*sweep) {
            const auto cells = cmd_sweep(grid, resolve(sweep_flags), worker_count_from_env(), std::cerr);
            std::size_t failed = 0;
            for (const auto& c : cells) failed += c.ok ? 0 : 1;
            std::cerr << cells.size() - failed << " of " << cells.size() << " cells ok\n";
        } else if (*synth) {
            cmd_synth(blobs, synth_out, parse_format(synth_format));
        }
    } catch (const Error& e) {
        std::cerr << "omcal " << app.get_subcommands().front()->get_name() << ": " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "omcal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
