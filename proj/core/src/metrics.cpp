#include "omcal/metrics.hpp"

#include "omcal/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omcal {

using Index = Eigen::Index;
__extension__ typedef __int128 Wide;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

namespace {

void check_inputs(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size())
        throw Error(ErrorKind::LengthMismatch, "metrics: " + std::to_string(pred.size()) + " predictions for " +
                                                   std::to_string(truth.size()) + " ground-truth labels");
    auto negative = [](int v) { return v < 0; };
    if (std::any_of(pred.begin(), pred.end(), negative) || std::any_of(truth.begin(), truth.end(), negative))
        throw Error(ErrorKind::InvalidParameter, "metrics: labels must be >= 0");
}

Wide pairs(std::int64_t x) { return static_cast<Wide>(x) * (x - 1) / 2; }

struct PairCounts {
    Wide both = 0;  // co-clustered in pred and truth
    Wide pred = 0;  // co-clustered in pred
    Wide truth = 0; // co-clustered in truth
    Wide total = 0;
};

PairCounts pair_counts(const ContingencyTable& table) {
    PairCounts pc;
    for (Index i = 0; i < table.counts.rows(); ++i)
        for (Index j = 0; j < table.counts.cols(); ++j) pc.both += pairs(table.counts(i, j));
    for (Index i = 0; i < table.counts.rows(); ++i) pc.pred += pairs(table.counts.row(i).sum());
    for (Index j = 0; j < table.counts.cols(); ++j) pc.truth += pairs(table.counts.col(j).sum());
    pc.total = pairs(table.n);
    return pc;
}

double ratio(Wide num, Wide den) {
    if (den == 0) return 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

double entropy(const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>& marginal, double n) {
    double h = 0.0;
    for (Index i = 0; i < marginal.size(); ++i) {
        if (marginal(i) == 0) continue;
        const double p = static_cast<double>(marginal(i)) / n;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

ContingencyTable ContingencyTable::build(std::span<const int> pred, std::span<const int> truth) {
    check_inputs(pred, truth);
    const int rows = pred.empty() ? 0 : *std::max_element(pred.begin(), pred.end()) + 1;
    const int cols = truth.empty() ? 0 : *std::max_element(truth.begin(), truth.end()) + 1;
    ContingencyTable table;
    table.counts = CountMatrix::Zero(rows, cols);
    for (std::size_t i = 0; i < pred.size(); ++i) ++table.counts(pred[i], truth[i]);
    table.n = static_cast<std::int64_t>(pred.size());
    return table;
}

std::vector<int> max_weight_assignment(const CountMatrix& weights) {
    const Index rows = weights.rows(), cols = weights.cols();
    const Index size = std::max(rows, cols);
    if (size == 0) return {};
    const std::int64_t top = weights.size() > 0 ? weights.maxCoeff() : 0;
    // Square min-cost matrix, 1-based for the potential method below.
    CountMatrix cost = CountMatrix::Constant(size + 1, size + 1, top);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) cost(i + 1, j + 1) = top - weights(i, j);

    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(size + 1, 0), v(size + 1, 0);
    std::vector<Index> match(size + 1, 0), way(size + 1, 0);
    for (Index i = 1; i <= size; ++i) {
        match[0] = i;
        Index j0 = 0;
        std::vector<std::int64_t> minv(size + 1, inf);
        std::vector<bool> used(size + 1, false);
        do {
            used[j0] = true;
            const Index i0 = match[j0];
            std::int64_t delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= size; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= size; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const Index j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(static_cast<std::size_t>(rows), -1);
    for (Index j = 1; j <= size; ++j) {
        const Index i = match[j] - 1;
        if (i < rows && j - 1 < cols) assignment[static_cast<std::size_t>(i)] = static_cast<int>(j - 1);
    }
    return assignment;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
    const auto table = ContingencyTable::build(pred, truth);
    if (table.n == 0) return 0.0;
    const auto assignment = max_weight_assignment(table.counts);
    std::int64_t matched = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] >= 0) matched += table.counts(static_cast<Index>(i), assignment[i]);
    return static_cast<double>(matched) / static_cast<double>(table.n);
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
    const auto table = ContingencyTable::build(pred, truth);
    if (table.n == 0) return 0.0;
    const double n = static_cast<double>(table.n);
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> a = table.counts.rowwise().sum();
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> b = table.counts.colwise().sum().transpose();
    const double hp = entropy(a, n), ht = entropy(b, n);
    if (hp == 0.0 && ht == 0.0) return 1.0; // both a single cluster
    if (hp == 0.0 || ht == 0.0) return 0.0;
    double mi = 0.0;
    for (Index i = 0; i < table.counts.rows(); ++i)
        for (Index j = 0; j < table.counts.cols(); ++j) {
            const auto nij = table.counts(i, j);
            if (nij == 0) continue;
            const double pij = static_cast<double>(nij) / n;
            mi += pij * std::log(static_cast<double>(nij) * n / (static_cast<double>(a(i)) * static_cast<double>(b(j))));
        }
    return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

double purity(std::span<const int> pred, std::span<const int> truth) {
    const auto table = ContingencyTable::build(pred, truth);
    if (table.n == 0) return 0.0;
    std::int64_t total = 0;
    for (Index i = 0; i < table.counts.rows(); ++i)
        if (table.counts.cols() > 0) total += table.counts.row(i).maxCoeff();
    return static_cast<double>(total) / static_cast<double>(table.n);
}

double ari(std::span<const int> pred, std::span<const int> truth) {
    const auto table = ContingencyTable::build(pred, truth);
    const PairCounts pc = pair_counts(table);
    // (index - expected) / (max - expected) scaled by 2 * total pairs.
    const Wide num = 2 * (pc.total * pc.both - pc.pred * pc.truth);
    const Wide den = pc.total * (pc.pred + pc.truth) - 2 * pc.pred * pc.truth;
    if (den == 0) return 1.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

PairScores pairwise_f_precision(std::span<const int> pred, std::span<const int> truth) {
    const auto table = ContingencyTable::build(pred, truth);
    const PairCounts pc = pair_counts(table);
    PairScores out;
    out.precision = ratio(pc.both, pc.pred);
    out.recall = ratio(pc.both, pc.truth);
    const double sum = out.precision + out.recall;
    out.f_score = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
    return out;
}

MetricReport evaluate(std::span<const int> pred, std::span<const int> truth) {
    MetricReport r;
    r.acc = accuracy(pred, truth);
    r.nmi = nmi(pred, truth);
    r.purity = purity(pred, truth);
    r.ari = ari(pred, truth);
    const PairScores pf = pairwise_f_precision(pred, truth);
    r.f_score = pf.f_score;
    r.precision = pf.precision;
    return r;
}

} // namespace omcal
