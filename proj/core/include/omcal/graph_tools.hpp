#pragma once

#include "omcal/dataset.hpp"
#include "omcal/error.hpp"

#include <vector>

namespace omcal {

/// Full-sample similarity graph B = S D^{-1} S^T of an anchor graph, with
/// D = diag(column sums of S).
struct FullGraph {
    Matrix B;                          // n x n, symmetric
    Vector D;                          // column sums of S, length m
    std::vector<Index> dropped_columns; // anchors with D_jj = 0
};

inline constexpr Index kMaxDenseFullGraph = 20000;

/// Zero columns are dropped with a warning; an all-zero S throws
/// AllZeroGraph. Negative entries throw InvalidParameter. Refuses n above
/// `max_dense`.
FullGraph reconstruct_full_graph(const Matrix& S, Diagnostics* diag = nullptr,
                                 Index max_dense = kMaxDenseFullGraph);

struct SparseEntry {
    Index row = 0;
    Index col = 0;
    double value = 0.0;
};

/// Row-wise top-k sparsification of B computed one row at a time (O(n m)
/// memory). Within a row, entries are ordered by decreasing value, ties by
/// column index.
std::vector<SparseEntry> reconstruct_full_graph_topk(const Matrix& S, Index top_k, Diagnostics* diag = nullptr);

} // namespace omcal
