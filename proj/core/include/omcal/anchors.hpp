#pragma once

#include "omcal/dataset.hpp"
#include "omcal/error.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace omcal {

struct KMeansResult {
    Matrix centers;              // k x d
    std::vector<int> assignment; // length n
    int iterations = 0;          // Lloyd iterations performed
    bool converged = false;      // assignments stopped changing or centers settled
};

/// k-means++ seeding followed by Lloyd iterations (Euclidean). Ties in the
/// nearest-center search go to the lowest center index. Empty clusters are
/// reseeded with the point farthest from its current center.
/// Stops once assignments stop changing or the total squared center shift of
/// one update drops to tol times the mean per-feature variance of x
/// (tol = 0 keeps only the exact fixed-point test).
KMeansResult kmeans(const Matrix& x, Index k, std::uint64_t seed, int max_iters, Diagnostics* diag = nullptr,
                    double tol = 1e-4);

enum class AnchorSelector {
    /// One k-means over the concatenated views (each view scaled to unit
    /// total variance); view v's anchors are the partition means in view v's
    /// own features. Anchor j refers to the same sample group in every view.
    JointKMeans,
    /// Independent k-means per view. Anchor indices do not correspond across
    /// views, so the consensus mixture of graphs adds unrelated columns.
    PerViewKMeans,
    /// m distinct samples drawn uniformly, shared across views.
    Random,
};

/// Per-view anchors; every view has the same anchor count m.
struct AnchorSet {
    std::vector<Matrix> anchors;         // m x d_v per view
    Index m = 0;
    std::vector<int> kmeans_iterations;  // t1 per view (0 for random selection)
};

AnchorSet select_anchors(const MultiViewDataset& ds, Index m, std::uint64_t seed, int max_iters = 100,
                         Diagnostics* diag = nullptr, AnchorSelector selector = AnchorSelector::JointKMeans);

/// Weights of one row of a normalized k-NN anchor graph given the squared
/// distances from a sample to every anchor. Requires 1 <= k < distances.size().
/// The k nearest anchors (stable by index on ties) get
///   (d_{k+1} - d_j) / (k d_{k+1} - sum_{h<=k} d_h),
/// and 1/k each when the denominator vanishes.
Vector anchor_graph_row(const Vector& sq_distances, Index k);

/// n x m row-stochastic graph between samples `x` and `anchors`.
Matrix build_anchor_graph(const Matrix& x, const Matrix& anchors, Index k);

struct AnchorGraphSet {
    std::vector<Matrix> graphs; // n x m per view
    Index k = 0;

    Index n() const { return graphs.empty() ? 0 : graphs.front().rows(); }
    Index m() const { return graphs.empty() ? 0 : graphs.front().cols(); }
    std::size_t view_count() const { return graphs.size(); }
};

AnchorGraphSet build_all(const MultiViewDataset& ds, const AnchorSet& anchors, Index k);

/// Neighbor count actually used for m anchors: min(k, m - 1).
Index clamp_neighbors(Index k, Index m);

/// Throws unless all graphs share n and m and every entry is finite and >= 0.
void validate(const AnchorGraphSet& graphs);

struct GraphCacheInfo {
    Index m = 0;
    Index k = 0;
    std::uint64_t seed = 0;
};

/// Stores the graphs in the dataset directory layout plus `anchors.json`.
void save_graphs(const AnchorGraphSet& graphs, const std::filesystem::path& root, std::uint64_t seed,
                 MatrixFormat format = MatrixFormat::F64le);
AnchorGraphSet load_graphs(const std::filesystem::path& root, GraphCacheInfo* info = nullptr);

} // namespace omcal
