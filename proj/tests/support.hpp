#pragma once

#include <omcal/omcal.hpp>

#include <Eigen/SVD>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace omcal::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("omcal_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& file, const std::string& text) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream(file) << text;
}

inline std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

inline Matrix uniform(Index rows, Index cols, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
    return m;
}

/// m x c matrix with orthonormal columns, via the full SVD of a Gaussian draw.
inline Matrix random_orthonormal(Index m, Index c, std::mt19937_64& rng) {
    Eigen::BDCSVD<Matrix> svd(gaussian(m, c, rng), Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().transpose();
}

/// Reference nuclear norm from a divide-and-conquer SVD.
inline double reference_nuclear_norm(const Matrix& a) {
    return Eigen::BDCSVD<Matrix>(a).singularValues().sum();
}

/// Row-stochastic n x m graph with exactly k random nonzeros per row.
inline Matrix random_sparse_graph(Index n, Index m, Index k, std::mt19937_64& rng) {
    Matrix s = Matrix::Zero(n, m);
    std::vector<Index> cols(static_cast<std::size_t>(m));
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) cols[static_cast<std::size_t>(j)] = j;
        std::shuffle(cols.begin(), cols.end(), rng);
        double total = 0.0;
        for (Index t = 0; t < k; ++t) total += s(i, cols[static_cast<std::size_t>(t)]) = u(rng);
        s.row(i) /= total;
    }
    return s;
}

/// Anchor graphs of a small synthetic multi-view problem.
inline AnchorGraphSet blob_graphs(Index n, int clusters, Index m, Index k, std::uint64_t seed,
                                  std::vector<Index> dims = {6, 8}) {
    BlobsParams p;
    p.n = n;
    p.clusters = clusters;
    p.dims = std::move(dims);
    p.separation = 5.0;
    p.noise = 1.0;
    p.seed = seed;
    const MultiViewDataset ds = synth_blobs(p);
    return build_all(ds, select_anchors(ds, m, seed), k);
}

} // namespace omcal::testing
