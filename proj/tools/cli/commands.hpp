#pragma once

#include "cli/reports.hpp"
#include "cli/run_config.hpp"

#include <omcal/dataset.hpp>
#include <omcal/error.hpp>
#include <omcal/metrics.hpp>
#include <omcal/solver.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace omcal::cli {

/// 0 success, 2 configuration, 3 data, 4 numerical breakdown.
int exit_code(ErrorKind kind);

/// Runs `body`, prefixing any omcal::Error message with the stage name so
/// failures read like `anchors: InvalidParameter: ...`.
template <class F>
decltype(auto) stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + ": " + e.detail());
    }
}

/// Pool size for sweep cells, from OMCAL_WORKERS (default 1).
int worker_count_from_env();

struct PreparedGraphs {
    AnchorGraphSet graphs;
    Index m = 0;
    double build_seconds = 0.0;
};

/// Anchor selection and graph construction for the configured anchor count
/// (or the default for `clusters` classes when it is 0).
PreparedGraphs prepare_graphs(const MultiViewDataset& ds, const RunConfig& config, int clusters,
                              Diagnostics* diag = nullptr);

struct SolveOutcome {
    ClusteringResult result;
    std::optional<MetricReport> metrics;
};

/// fit, or fit_single on `config.view` when `config.single_view` is set.
SolveOutcome solve(const AnchorGraphSet& graphs, const RunConfig& config, int clusters,
                   const std::optional<Labels>& truth);

/// Full pipeline. Writes labels.txt, results.json and convergence.csv (and
/// optionally graphs/ and consensus/) under config.output.
FitReport cmd_fit(const RunConfig& config, std::ostream& log);

/// Compares a predicted label file with a ground-truth label file.
MetricReport cmd_evaluate(const std::filesystem::path& predicted, const std::filesystem::path& truth);

struct ReconstructOptions {
    std::filesystem::path input;   // directory in dataset layout (graphs/, consensus/)
    std::filesystem::path matrix;  // or a single CSV matrix
    int view = 0;
    std::filesystem::path output;  // .csv or .f64 for dense, CSV triplets with top_k
    Index top_k = 0;               // 0: dense
    bool strict = false;           // reject negative entries instead of clipping them
};

/// Writes the full n x n graph of an anchor graph. Returns the number of
/// negative entries that were clipped to zero.
Index cmd_reconstruct_graph(const ReconstructOptions& options, std::ostream& log);

struct BenchmarkOptions {
    std::vector<Index> sizes;
    int clusters = 5;
    Index anchors = 30;
    Index dims = 20;       // per view
    int views = 2;
    Index neighbors = 5;
    double separation = 10.0;
    double noise = 1.0;
    std::uint64_t seed = 0;
    SolverConfig solver;   // clusters is overwritten
    std::filesystem::path output;  // CSV; empty: not written
};

/// One synthetic dataset per size, timed sequentially so rows do not compete
/// for cores.
std::vector<BenchmarkRow> cmd_benchmark(const BenchmarkOptions& options, std::ostream& log);

struct SweepGrid {
    std::vector<Index> anchors;
    std::vector<double> betas;
    std::vector<double> gammas;
};

/// One fit per (m, beta, gamma) cell on a pool of `workers` threads. Failed
/// cells are recorded with their error and the sweep continues. Writes
/// `<output>/sweep.csv` and one `<output>/cells/cell_<i>.json` per cell.
std::vector<SweepCell> cmd_sweep(const SweepGrid& grid, const RunConfig& config, int workers, std::ostream& log);

/// Writes a synthetic dataset in the dataset directory layout.
void cmd_synth(const BlobsParams& params, const std::filesystem::path& root, MatrixFormat format);

void print_warnings(const Diagnostics& diag, std::ostream& log);

} // namespace omcal::cli
