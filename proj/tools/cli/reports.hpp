#pragma once

#include <omcal/dataset.hpp>
#include <omcal/metrics.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace omcal::cli {

/// Contents of results.json.
struct FitReport {
    std::string labels_file = "labels.txt";
    std::string convergence_file = "convergence.csv";
    Index n = 0;
    int views = 0;
    int clusters = 0;
    Index anchors = 0;
    Index neighbors = 0;
    double beta = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    bool single_view = false;
    std::vector<double> alpha;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    int restart_used = 0;
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
    std::optional<MetricReport> metrics;
    std::vector<std::pair<std::string, int>> warnings;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

nlohmann::ordered_json to_json(const MetricReport& metrics);
MetricReport metrics_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::json& j);
FitReport read_fit_report(const std::filesystem::path& file);

/// convergence.csv: header `iteration,objective`, iteration 0 is the initial state.
std::string convergence_csv(const std::vector<double>& history);
std::vector<double> read_convergence_csv(const std::filesystem::path& file);

struct BenchmarkRow {
    Index n = 0;
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
    int iterations = 0;        // solver cycles
    int kmeans_iterations = 0; // Lloyd iterations of anchor selection
};

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> read_benchmark_csv(const std::filesystem::path& file);

struct SweepCell {
    Index anchors = 0;
    double beta = 0.0;
    double gamma = 0.0;
    bool ok = false;
    std::optional<MetricReport> metrics;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool monotone = false;  // objective never rose by more than 1e-9 relative
    double seconds = 0.0;
    std::string error;      // empty when ok
};

/// The error column is last and may contain commas.
std::string sweep_csv(const std::vector<SweepCell>& cells);
std::vector<SweepCell> read_sweep_csv(const std::filesystem::path& file);

} // namespace omcal::cli
