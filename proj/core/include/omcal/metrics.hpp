#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace omcal {

/// counts(p, t) = number of samples with predicted cluster p and class t.
/// Labels are expected to be 0-based; the table is sized by the max label.
struct ContingencyTable {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
    std::int64_t n = 0;

    static ContingencyTable build(std::span<const int> pred, std::span<const int> truth);
};

/// Optimal one-to-one assignment maximizing total weight on a rectangular
/// matrix (Kuhn-Munkres on the zero-padded square). Returns, per row, the
/// assigned column or -1 for padding.
std::vector<int> max_weight_assignment(const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& weights);

double accuracy(std::span<const int> pred, std::span<const int> truth);
double nmi(std::span<const int> pred, std::span<const int> truth);
double purity(std::span<const int> pred, std::span<const int> truth);
double ari(std::span<const int> pred, std::span<const int> truth);

struct PairScores {
    double f_score = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// Pair-counting precision/recall/F over all unordered sample pairs; 0/0 is 0.
PairScores pairwise_f_precision(std::span<const int> pred, std::span<const int> truth);

struct MetricReport {
    double acc = 0.0;
    double nmi = 0.0;
    double purity = 0.0;
    double ari = 0.0;
    double f_score = 0.0;
    double precision = 0.0;
};

MetricReport evaluate(std::span<const int> pred, std::span<const int> truth);

} // namespace omcal
