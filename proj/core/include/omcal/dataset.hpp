#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace omcal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Labels = std::vector<int>;

enum class MatrixFormat { Csv, F64le };

/// V feature matrices over the same n samples. Rows are samples.
struct MultiViewDataset {
    std::vector<Matrix> views;
    std::vector<std::string> view_names;
    std::optional<Labels> labels;

    Index n() const { return views.empty() ? 0 : views.front().rows(); }
    std::size_t view_count() const { return views.size(); }
    /// Number of distinct ground-truth classes, 0 without labels.
    int class_count() const;
};

/// Throws omcal::Error naming the offending view and entry when an
/// invariant (equal row counts, finite entries, label length) is violated.
void validate(const MultiViewDataset& ds);

/// Reads `root/meta.json` and the files it declares.
MultiViewDataset load_dataset(const std::filesystem::path& root);

struct SaveOptions {
    MatrixFormat format = MatrixFormat::Csv;
};

/// Writes meta.json, one file per view (`view_<i>.csv` or `view_<i>.f64`)
/// and `labels.txt` when labels are present. Creates `root` if needed.
void save_dataset(const MultiViewDataset& ds, const std::filesystem::path& root,
                  SaveOptions options = {});

// Matrix and label files. `expected_cols`/`expected_rows` of -1 mean "infer".
Matrix read_matrix_csv(const std::filesystem::path& file, Index expected_cols = -1);
Matrix read_matrix_f64le(const std::filesystem::path& file, Index rows, Index cols);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& file);
void write_matrix_f64le(const Matrix& m, const std::filesystem::path& file);

/// One integer per line. The result is remapped to 0..c-1: label sets that
/// already are {0..c-1} are kept verbatim, any other alphabet is renumbered
/// in first-occurrence order.
Labels read_labels(const std::filesystem::path& file);
void write_labels(std::span<const int> labels, const std::filesystem::path& file);
Labels remap_labels(std::span<const long long> raw);

/// Writes `text` to `file` through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& file, const std::string& text);

/// Per-feature z-score in place; constant features become 0.
void zscore_normalize(MultiViewDataset& ds);

struct BlobsParams {
    Index n = 300;
    int clusters = 3;
    std::vector<Index> dims = {2, 2};
    double separation = 10.0;
    double noise = 0.1;
    std::uint64_t seed = 0;
};

/// Gaussian blobs shared across views. Sample i belongs to cluster
/// floor(i * c / n); each view draws its own centers (standard normal times
/// `separation`) and adds isotropic noise with standard deviation `noise`.
MultiViewDataset synth_blobs(const BlobsParams& params);

} // namespace omcal
