#include "omcal/anchors.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace omcal {

namespace {

Vector squared_distances_to(const Matrix& x, const Eigen::RowVectorXd& c) {
    return (x.rowwise() - c).rowwise().squaredNorm();
}

Matrix plus_plus_seeding(const Matrix& x, Index k, std::mt19937_64& rng, bool& degenerate) {
    const Index n = x.rows();
    Matrix centers(k, x.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);

    std::uniform_int_distribution<Index> pick(0, n - 1);
    Index first = pick(rng);
    centers.row(0) = x.row(first);
    chosen[static_cast<std::size_t>(first)] = true;
    Vector nearest = squared_distances_to(x, centers.row(0));

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Index c = 1; c < k; ++c) {
        const double total = nearest.sum();
        Index next = -1;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            for (Index i = 0; i < n; ++i) {
                acc += nearest(i);
                if (nearest(i) > 0.0 && acc >= target) {
                    next = i;
                    break;
                }
            }
            if (next < 0) {
                for (Index i = n - 1; i >= 0; --i)
                    if (nearest(i) > 0.0) {
                        next = i;
                        break;
                    }
            }
        } else {
            // Fewer distinct rows than centers: fall back to unused rows.
            degenerate = true;
            std::vector<Index> unused;
            for (Index i = 0; i < n; ++i)
                if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
            std::uniform_int_distribution<std::size_t> u(0, unused.size() - 1);
            next = unused[u(rng)];
        }
        centers.row(c) = x.row(next);
        chosen[static_cast<std::size_t>(next)] = true;
        nearest = nearest.cwiseMin(squared_distances_to(x, centers.row(c)));
    }
    return centers;
}

} // namespace

KMeansResult kmeans(const Matrix& x, Index k, std::uint64_t seed, int max_iters, Diagnostics* diag, double tol) {
    const Index n = x.rows();
    if (k < 1 || k > n)
        throw Error(ErrorKind::InvalidParameter,
                    "kmeans: need 1 <= k <= n, got k=" + std::to_string(k) + " n=" + std::to_string(n));
    if (max_iters < 1) throw Error(ErrorKind::InvalidParameter, "kmeans: max_iters must be >= 1");
    if (!(tol >= 0.0)) throw Error(ErrorKind::InvalidParameter, "kmeans: tol must be >= 0");

    std::mt19937_64 rng(seed);
    bool degenerate = false;
    KMeansResult out;
    out.centers = plus_plus_seeding(x, k, rng, degenerate);
    if (degenerate) warn(diag, "DegenerateView: fewer than " + std::to_string(k) + " distinct rows");

    // Shift threshold scaled to the data, so it means the same thing for any n.
    const double variance = (x.rowwise() - x.colwise().mean()).squaredNorm() / static_cast<double>(n * x.cols());
    const double shift_tol = tol * variance;

    // Lloyd iterations with Hamerly's bounds: upper(i) bounds the distance to
    // the assigned center from above, lower(i) the distance to every other
    // center from below. A sample is rescanned unless upper(i) is strictly
    // below both lower(i) and half the gap from its center to the nearest
    // other one, so assignments and lowest-index ties match a full scan.
    const Matrix xt = x.transpose();  // samples as contiguous columns
    Matrix ct = out.centers.transpose();
    out.assignment.assign(static_cast<std::size_t>(n), -1);
    Vector upper = Vector::Constant(n, std::numeric_limits<double>::infinity());
    Vector lower = Vector::Zero(n);
    Vector half_gap(k), shift(k);
    Matrix sums(x.cols(), k);
    std::vector<Index> counts(static_cast<std::size_t>(k));

    for (int iter = 1; iter <= max_iters; ++iter) {
        out.iterations = iter;
        for (Index c = 0; c < k; ++c) {
            double nearest = std::numeric_limits<double>::infinity();
            for (Index o = 0; o < k; ++o)
                if (o != c) nearest = std::min(nearest, (ct.col(c) - ct.col(o)).norm());
            half_gap(c) = 0.5 * nearest;
        }

        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            auto& slot = out.assignment[static_cast<std::size_t>(i)];
            if (slot >= 0) {
                const double bound = std::max(half_gap(slot), lower(i));
                if (upper(i) < bound) continue;
                upper(i) = (xt.col(i) - ct.col(slot)).norm();
                if (upper(i) < bound) continue;
            }
            Index arg = 0;
            double first = std::numeric_limits<double>::infinity(), second = first;
            for (Index c = 0; c < k; ++c) {
                const double dist = (xt.col(i) - ct.col(c)).norm();
                if (dist < first) {
                    second = first;
                    first = dist;
                    arg = c;
                } else if (dist < second) {
                    second = dist;
                }
            }
            upper(i) = first;
            lower(i) = second;
            if (slot != static_cast<int>(arg)) {
                slot = static_cast<int>(arg);
                changed = true;
            }
        }
        if (!changed) {
            out.converged = true;
            break;
        }

        sums.setZero();
        std::fill(counts.begin(), counts.end(), Index{0});
        for (Index i = 0; i < n; ++i) {
            const int c = out.assignment[static_cast<std::size_t>(i)];
            sums.col(c) += xt.col(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        const Matrix previous = ct;
        Vector own_dist;  // exact distance to the current center, filled on first reseed
        for (Index c = 0; c < k; ++c) {
            const auto count = counts[static_cast<std::size_t>(c)];
            if (count > 0) {
                ct.col(c) = sums.col(c) / static_cast<double>(count);
                continue;
            }
            if (own_dist.size() == 0) {
                own_dist.resize(n);
                for (Index i = 0; i < n; ++i)
                    own_dist(i) = (xt.col(i) - previous.col(out.assignment[static_cast<std::size_t>(i)])).norm();
            }
            Index far = 0;
            own_dist.maxCoeff(&far);
            own_dist(far) = -1.0;
            ct.col(c) = xt.col(far);
            warn(diag, "kmeans: reseeded an empty cluster");
        }
        out.centers = ct.transpose();

        for (Index c = 0; c < k; ++c) shift(c) = (ct.col(c) - previous.col(c)).norm();
        if (shift.squaredNorm() <= shift_tol) {
            out.converged = true;
            break;
        }
        if (own_dist.size() > 0) {
            // A reseeded center can jump anywhere; rescan every sample.
            upper.setConstant(std::numeric_limits<double>::infinity());
            lower.setZero();
            continue;
        }
        Index top = 0;
        shift.maxCoeff(&top);
        double runner_up = 0.0;
        for (Index c = 0; c < k; ++c)
            if (c != top) runner_up = std::max(runner_up, shift(c));
        for (Index i = 0; i < n; ++i) {
            const int a = out.assignment[static_cast<std::size_t>(i)];
            upper(i) += shift(a);
            lower(i) -= a == top ? runner_up : shift(top);
        }
    }
    return out;
}

} // namespace omcal
