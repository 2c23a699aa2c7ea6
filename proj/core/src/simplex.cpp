#include "omcal/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <vector>

namespace omcal {

Vector project_to_simplex(const Vector& v) {
    const Index n = v.size();
    if (n == 0) throw Error(ErrorKind::InvalidParameter, "project_to_simplex: empty vector");
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Index j = 0; j < n; ++j) {
        cumulative += sorted[static_cast<std::size_t>(j)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
    }
    Vector out = (v.array() - theta).cwiseMax(0.0);
    const double total = out.sum();
    if (total > 0.0) out /= total;
    return out;
}

QpResult solve_simplex_qp(const Matrix& Q, const Vector& b, const Vector& start, QpControls controls) {
    const Index dim = Q.rows();
    if (Q.cols() != dim || b.size() != dim || start.size() != dim)
        throw Error(ErrorKind::ShapeMismatch, "solve_simplex_qp: inconsistent dimensions");

    QpResult out;
    out.x = project_to_simplex(start);
    if (dim == 1) {
        out.converged = true;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * std::max(eig.eigenvalues().maxCoeff(), 0.0);
    if (!(lipschitz > 0.0)) {
        // Linear objective: the minimizer is a vertex.
        Index best = 0;
        b.maxCoeff(&best);
        if (b.maxCoeff() > b.minCoeff()) out.x = Vector::Unit(dim, best);
        out.converged = true;
        return out;
    }

    auto value = [&](const Vector& x) { return x.dot(Q * x) - x.dot(b); };
    Vector best_x = out.x;
    double best_value = value(out.x);
    const double step = 1.0 / lipschitz;
    for (int it = 1; it <= controls.max_iters; ++it) {
        const Vector grad = 2.0 * (Q * out.x) - b;
        Vector next = project_to_simplex(out.x - step * grad);
        const double change = (next - out.x).lpNorm<Eigen::Infinity>();
        out.x = std::move(next);
        out.iterations = it;
        const double f = value(out.x);
        if (f <= best_value) {
            best_value = f;
            best_x = out.x;
        }
        if (change < controls.tol) {
            out.converged = true;
            break;
        }
    }
    out.x = best_x;
    return out;
}

Matrix graph_gram(const AnchorGraphSet& graphs) {
    const Index views = static_cast<Index>(graphs.view_count());
    Matrix gram(views, views);
    for (Index u = 0; u < views; ++u)
        for (Index v = 0; v <= u; ++v) {
            const double ip = (graphs.graphs[static_cast<std::size_t>(u)].array() *
                               graphs.graphs[static_cast<std::size_t>(v)].array())
                                  .sum();
            gram(u, v) = ip;
            gram(v, u) = ip;
        }
    return gram;
}

Vector update_alpha(const AnchorGraphSet& graphs, const Matrix& gram, const Matrix& Z, QpControls controls,
                    const Vector* start, Diagnostics* diag) {
    const Index views = static_cast<Index>(graphs.view_count());
    if (views == 0) throw Error(ErrorKind::InvalidParameter, "update_alpha: no graphs");
    if (views == 1) return Vector::Ones(1);

    Vector lin(views);
    for (Index v = 0; v < views; ++v)
        lin(v) = 2.0 * (graphs.graphs[static_cast<std::size_t>(v)].array() * Z.array()).sum();

    const Vector uniform = Vector::Constant(views, 1.0 / static_cast<double>(views));
    QpResult qp = solve_simplex_qp(gram, lin, start != nullptr ? *start : uniform, controls);
    if (!qp.converged) warn(diag, "QpNotConverged: view-weight QP hit qp_max_iters");
    return qp.x;
}

Vector update_alpha(const AnchorGraphSet& graphs, const Matrix& Z, QpControls controls, const Vector* start,
                    Diagnostics* diag) {
    return update_alpha(graphs, graph_gram(graphs), Z, controls, start, diag);
}

} // namespace omcal
