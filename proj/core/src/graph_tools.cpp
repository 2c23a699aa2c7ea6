#include "omcal/graph_tools.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omcal {

namespace {

// S[:, kept] * D^{-1/2} so that B = A A^T.
Matrix scaled_factor(const Matrix& S, Vector& column_sums, std::vector<Index>& dropped, Diagnostics* diag) {
    if (S.size() == 0) throw Error(ErrorKind::AllZeroGraph, "full graph: empty anchor graph");
    if (!S.allFinite()) throw Error(ErrorKind::NonFiniteValue, "full graph: anchor graph has non-finite entries");
    if ((S.array() < 0.0).any()) throw Error(ErrorKind::InvalidParameter, "full graph: anchor graph has negative entries");
    column_sums = S.colwise().sum().transpose();
    std::vector<Index> kept;
    for (Index j = 0; j < S.cols(); ++j) {
        if (column_sums(j) > 0.0)
            kept.push_back(j);
        else
            dropped.push_back(j);
    }
    if (kept.empty()) throw Error(ErrorKind::AllZeroGraph, "full graph: every anchor column sums to zero");
    if (!dropped.empty())
        warn(diag, "full graph: dropped " + std::to_string(dropped.size()) + " all-zero anchor column(s)");
    Matrix a(S.rows(), static_cast<Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c)
        a.col(static_cast<Index>(c)) = S.col(kept[c]) / std::sqrt(column_sums(kept[c]));
    return a;
}

} // namespace

FullGraph reconstruct_full_graph(const Matrix& S, Diagnostics* diag, Index max_dense) {
    if (S.rows() > max_dense)
        throw Error(ErrorKind::InvalidParameter, "full graph: n=" + std::to_string(S.rows()) +
                                                     " exceeds the dense limit " + std::to_string(max_dense) +
                                                     "; use the top-k sparsified form");
    FullGraph out;
    const Matrix a = scaled_factor(S, out.D, out.dropped_columns, diag);
    out.B = Matrix::Zero(S.rows(), S.rows());
    out.B.selfadjointView<Eigen::Lower>().rankUpdate(a);
    out.B.triangularView<Eigen::StrictlyUpper>() = out.B.transpose();
    return out;
}

std::vector<SparseEntry> reconstruct_full_graph_topk(const Matrix& S, Index top_k, Diagnostics* diag) {
    if (top_k < 1) throw Error(ErrorKind::InvalidParameter, "full graph: top_k must be >= 1");
    Vector column_sums;
    std::vector<Index> dropped;
    const Matrix a = scaled_factor(S, column_sums, dropped, diag);
    const Index n = S.rows();
    const Index keep = std::min(top_k, n);

    std::vector<SparseEntry> out;
    out.reserve(static_cast<std::size_t>(n * keep));
    std::vector<Index> order(static_cast<std::size_t>(n));
    Vector row(n);
    for (Index i = 0; i < n; ++i) {
        row.noalias() = a * a.row(i).transpose();
        std::iota(order.begin(), order.end(), Index{0});
        std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](Index x, Index y) {
            if (row(x) != row(y)) return row(x) > row(y);
            return x < y;
        });
        for (Index r = 0; r < keep; ++r) {
            const Index j = order[static_cast<std::size_t>(r)];
            out.push_back({i, j, row(j)});
        }
    }
    return out;
}

} // namespace omcal
