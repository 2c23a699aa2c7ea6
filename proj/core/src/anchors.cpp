#include "omcal/anchors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace omcal {

namespace fs = std::filesystem;

Index clamp_neighbors(Index k, Index m) { return std::min(k, m - 1); }

namespace {

Index count_distinct_rows(const Matrix& x) {
    std::vector<Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    auto less = [&](Index a, Index b) {
        for (Index j = 0; j < x.cols(); ++j)
            if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    Index distinct = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (less(order[i - 1], order[i])) ++distinct;
    return distinct;
}

Matrix group_means(const Matrix& x, const std::vector<int>& assignment, Index m, const Matrix& fallback) {
    Matrix sums = Matrix::Zero(m, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(m), 0);
    for (Index i = 0; i < x.rows(); ++i) {
        sums.row(assignment[static_cast<std::size_t>(i)]) += x.row(i);
        ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
    }
    for (Index j = 0; j < m; ++j) {
        const auto count = counts[static_cast<std::size_t>(j)];
        if (count > 0)
            sums.row(j) /= static_cast<double>(count);
        else
            sums.row(j) = fallback.row(j);
    }
    return sums;
}

} // namespace

AnchorSet select_anchors(const MultiViewDataset& ds, Index m, std::uint64_t seed, int max_iters, Diagnostics* diag,
                         AnchorSelector selector) {
    const Index n = ds.n();
    if (m < 1 || m > n)
        throw Error(ErrorKind::InvalidParameter,
                    "select_anchors: need 1 <= m <= n, got m=" + std::to_string(m) + " n=" + std::to_string(n));
    for (std::size_t v = 0; v < ds.views.size(); ++v)
        if (count_distinct_rows(ds.views[v]) < m)
            warn(diag, "DegenerateView: view " + std::to_string(v) + " has fewer than " + std::to_string(m) +
                           " distinct rows");

    AnchorSet out;
    out.m = m;
    switch (selector) {
    case AnchorSelector::Random: {
        std::vector<Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), Index{0});
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (const Matrix& x : ds.views) {
            Matrix a(m, x.cols());
            for (Index j = 0; j < m; ++j) a.row(j) = x.row(idx[static_cast<std::size_t>(j)]);
            out.anchors.push_back(std::move(a));
            out.kmeans_iterations.push_back(0);
        }
        break;
    }
    case AnchorSelector::PerViewKMeans: {
        for (std::size_t v = 0; v < ds.views.size(); ++v) {
            const std::uint64_t view_seed = seed + 0x9E3779B97F4A7C15ULL * (v + 1);
            KMeansResult km = kmeans(ds.views[v], m, view_seed, max_iters);
            out.anchors.push_back(group_means(ds.views[v], km.assignment, m, km.centers));
            out.kmeans_iterations.push_back(km.iterations);
        }
        break;
    }
    case AnchorSelector::JointKMeans: {
        Index total_dims = 0;
        for (const Matrix& x : ds.views) total_dims += x.cols();
        Matrix joint(n, total_dims);
        std::vector<double> scales;
        Index offset = 0;
        for (const Matrix& x : ds.views) {
            const double spread = (x.rowwise() - x.colwise().mean()).squaredNorm() / static_cast<double>(n);
            const double scale = spread > 0.0 ? 1.0 / std::sqrt(spread) : 1.0;
            joint.middleCols(offset, x.cols()) = scale * x;
            scales.push_back(scale);
            offset += x.cols();
        }
        KMeansResult km = kmeans(joint, m, seed, max_iters);
        offset = 0;
        for (std::size_t v = 0; v < ds.views.size(); ++v) {
            const Matrix& x = ds.views[v];
            const Matrix fallback = km.centers.middleCols(offset, x.cols()) / scales[v];
            out.anchors.push_back(group_means(x, km.assignment, m, fallback));
            out.kmeans_iterations.push_back(km.iterations);
            offset += x.cols();
        }
        break;
    }
    }
    return out;
}

Vector anchor_graph_row(const Vector& sq_distances, Index k) {
    const Index m = sq_distances.size();
    if (k < 1 || k >= m)
        throw Error(ErrorKind::InvalidParameter,
                    "anchor graph: need 1 <= k < m, got k=" + std::to_string(k) + " m=" + std::to_string(m));
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::partial_sort(order.begin(), order.begin() + k + 1, order.end(), [&](Index a, Index b) {
        if (sq_distances(a) != sq_distances(b)) return sq_distances(a) < sq_distances(b);
        return a < b;
    });

    const double next = sq_distances(order[static_cast<std::size_t>(k)]);
    double head = 0.0;
    for (Index j = 0; j < k; ++j) head += sq_distances(order[static_cast<std::size_t>(j)]);
    const double kd = static_cast<double>(k) * next;
    const double denom = kd - head;

    Vector row = Vector::Zero(m);
    if (!(denom > 1e-14 * kd)) {
        for (Index j = 0; j < k; ++j) row(order[static_cast<std::size_t>(j)]) = 1.0 / static_cast<double>(k);
        return row;
    }
    for (Index j = 0; j < k; ++j) {
        const Index a = order[static_cast<std::size_t>(j)];
        row(a) = (next - sq_distances(a)) / denom;
    }
    return row;
}

Matrix build_anchor_graph(const Matrix& x, const Matrix& anchors, Index k) {
    const Index m = anchors.rows();
    if (x.cols() != anchors.cols())
        throw Error(ErrorKind::ShapeMismatch, "anchor graph: samples have " + std::to_string(x.cols()) +
                                                  " features, anchors " + std::to_string(anchors.cols()));
    if (k < 1 || k >= m)
        throw Error(ErrorKind::InvalidParameter,
                    "anchor graph: need 1 <= k < m, got k=" + std::to_string(k) + " m=" + std::to_string(m));

    Matrix dist(x.rows(), m);
    for (Index j = 0; j < m; ++j) dist.col(j) = (x.rowwise() - anchors.row(j)).rowwise().squaredNorm();

    Matrix s(x.rows(), m);
    Vector row(m);
    for (Index i = 0; i < x.rows(); ++i) {
        row = dist.row(i).transpose();
        s.row(i) = anchor_graph_row(row, k).transpose();
    }
    return s;
}

AnchorGraphSet build_all(const MultiViewDataset& ds, const AnchorSet& anchors, Index k) {
    if (anchors.anchors.size() != ds.views.size())
        throw Error(ErrorKind::ShapeMismatch, "build_all: " + std::to_string(anchors.anchors.size()) +
                                                  " anchor sets for " + std::to_string(ds.views.size()) + " views");
    AnchorGraphSet out;
    out.k = k;
    for (std::size_t v = 0; v < ds.views.size(); ++v)
        out.graphs.push_back(build_anchor_graph(ds.views[v], anchors.anchors[v], k));
    return out;
}

void validate(const AnchorGraphSet& graphs) {
    if (graphs.graphs.empty()) throw Error(ErrorKind::InvalidParameter, "anchor graph set is empty");
    const Index n = graphs.n(), m = graphs.m();
    if (n < 1 || m < 1) throw Error(ErrorKind::ShapeMismatch, "anchor graph 0 is empty");
    for (std::size_t v = 0; v < graphs.graphs.size(); ++v) {
        const Matrix& s = graphs.graphs[v];
        if (s.rows() != n || s.cols() != m)
            throw Error(ErrorKind::ShapeMismatch, "anchor graph " + std::to_string(v) + " is " +
                                                      std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                                                      ", expected " + std::to_string(n) + "x" + std::to_string(m));
        if (!s.allFinite())
            throw Error(ErrorKind::NonFiniteValue, "anchor graph " + std::to_string(v) + " has non-finite entries");
        if ((s.array() < 0.0).any())
            throw Error(ErrorKind::InvalidParameter, "anchor graph " + std::to_string(v) + " has negative entries");
    }
}

void save_graphs(const AnchorGraphSet& graphs, const fs::path& root, std::uint64_t seed, MatrixFormat format) {
    validate(graphs);
    MultiViewDataset as_views;
    for (std::size_t v = 0; v < graphs.graphs.size(); ++v) {
        as_views.views.push_back(graphs.graphs[v]);
        as_views.view_names.push_back("graph" + std::to_string(v));
    }
    save_dataset(as_views, root, SaveOptions{format});
    nlohmann::json sidecar{{"m", graphs.m()}, {"k", graphs.k}, {"seed", seed}};
    write_file_atomic(root / "anchors.json", sidecar.dump(2) + "\n");
}

AnchorGraphSet load_graphs(const fs::path& root, GraphCacheInfo* info) {
    const fs::path sidecar_path = root / "anchors.json";
    if (!fs::exists(sidecar_path)) throw Error(ErrorKind::MissingFile, sidecar_path.string() + ": no such file");
    GraphCacheInfo parsed;
    try {
        std::ifstream in(sidecar_path);
        const auto sidecar = nlohmann::json::parse(in);
        parsed.m = sidecar.at("m").get<Index>();
        parsed.k = sidecar.at("k").get<Index>();
        parsed.seed = sidecar.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedMeta, sidecar_path.string() + ": " + e.what());
    }
    MultiViewDataset views = load_dataset(root);
    AnchorGraphSet out;
    out.k = parsed.k;
    out.graphs = std::move(views.views);
    if (out.m() != parsed.m)
        throw Error(ErrorKind::ShapeMismatch, sidecar_path.string() + ": declares m=" + std::to_string(parsed.m) +
                                                  " but graphs have " + std::to_string(out.m()) + " columns");
    validate(out);
    if (info != nullptr) *info = parsed;
    return out;
}

} // namespace omcal
