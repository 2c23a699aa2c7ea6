#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They share no code with the library.

#include <omcal/dataset.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

namespace omcal::testing {

// Best matched count over every injective relabeling of predicted ids.
inline double brute_force_accuracy(const Labels& pred, const Labels& truth) {
    const int cp = *std::max_element(pred.begin(), pred.end()) + 1;
    const int ct = *std::max_element(truth.begin(), truth.end()) + 1;
    const int size = std::max(cp, ct);
    std::vector<int> perm(static_cast<std::size_t>(size));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            hits += perm[static_cast<std::size_t>(pred[i])] == truth[i] ? 1 : 0;
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

struct PairCount {
    long long both = 0, pred = 0, truth = 0, total = 0;
};

inline PairCount enumerate_pairs(const Labels& pred, const Labels& truth) {
    PairCount pc;
    for (std::size_t i = 0; i < pred.size(); ++i)
        for (std::size_t j = i + 1; j < pred.size(); ++j) {
            const bool same_pred = pred[i] == pred[j], same_truth = truth[i] == truth[j];
            pc.both += same_pred && same_truth;
            pc.pred += same_pred;
            pc.truth += same_truth;
            ++pc.total;
        }
    return pc;
}

inline double pair_ari(const PairCount& pc) {
    const long long num = 2 * (pc.total * pc.both - pc.pred * pc.truth);
    const long long den = pc.total * (pc.pred + pc.truth) - 2 * pc.pred * pc.truth;
    return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline Matrix naive_full_graph(const Matrix& s) {
    const Index n = s.rows(), m = s.cols();
    Vector d = Vector::Zero(m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i) d(j) += s(i, j);
    Matrix b = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index l = 0; l < n; ++l)
            for (Index j = 0; j < m; ++j)
                if (d(j) > 0.0) b(i, l) += s(i, j) * s(l, j) / d(j);
    return b;
}

// Direct evaluation of the normalized k-NN weights, written independently of
// the library: sort indices by (distance, index), weight the first k.
inline Vector oracle_row(const Vector& d, Index k) {
    std::vector<Index> order(static_cast<std::size_t>(d.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d(a) < d(b); });
    const double next = d(order[static_cast<std::size_t>(k)]);
    double head = 0.0;
    for (Index h = 0; h < k; ++h) head += d(order[static_cast<std::size_t>(h)]);
    Vector w = Vector::Zero(d.size());
    for (Index j = 0; j < k; ++j) {
        const Index a = order[static_cast<std::size_t>(j)];
        w(a) = (next - d(a)) / (static_cast<double>(k) * next - head);
    }
    return w;
}

} // namespace omcal::testing
