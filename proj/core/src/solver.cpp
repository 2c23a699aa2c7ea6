#include "omcal/solver.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <random>

namespace omcal {

void validate(const SolverConfig& config) {
    if (config.clusters < 1) throw Error(ErrorKind::InvalidParameter, "solver: clusters must be >= 1");
    if (!(config.beta >= 0.0) || !std::isfinite(config.beta))
        throw Error(ErrorKind::InvalidParameter, "solver: beta must be finite and >= 0");
    if (!(config.gamma >= 0.0) || !std::isfinite(config.gamma))
        throw Error(ErrorKind::InvalidParameter, "solver: gamma must be finite and >= 0");
    if (config.max_iters < 1) throw Error(ErrorKind::InvalidParameter, "solver: max_iters must be >= 1");
    if (!(config.rel_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "solver: rel_tol must be > 0");
    if (config.qp_max_iters < 1) throw Error(ErrorKind::InvalidParameter, "solver: qp_max_iters must be >= 1");
    if (!(config.qp_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "solver: qp_tol must be > 0");
    if (config.restarts < 1) throw Error(ErrorKind::InvalidParameter, "solver: restarts must be >= 1");
}

SolverState init_state(const AnchorGraphSet& graphs, const SolverConfig& config, Diagnostics* diag) {
    (void)diag;
    validate(graphs);
    validate(config);
    const Index n = graphs.n(), m = graphs.m();
    const Index c = config.clusters;
    if (c > m)
        throw Error(ErrorKind::InvalidParameter, "solver: clusters (" + std::to_string(c) +
                                                     ") exceeds anchors (" + std::to_string(m) +
                                                     "); no m x c column-orthonormal G exists");

    SolverState state;
    const auto views = static_cast<Index>(graphs.view_count());
    state.alpha = Vector::Constant(views, 1.0 / static_cast<double>(views));
    state.Z = mix_graphs(graphs, state.alpha);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix draw(m, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < m; ++i) draw(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(draw);
    state.G = qr.householderQ() * Matrix::Identity(m, c);

    state.F.resize(n, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < n; ++i) state.F(i, j) = std::abs(normal(rng));
    return state;
}

Matrix update_F(const Matrix& Z, const Matrix& G) { return (Z * G).cwiseMax(0.0); }

Matrix mix_graphs(const AnchorGraphSet& graphs, const Vector& alpha) {
    if (static_cast<std::size_t>(alpha.size()) != graphs.view_count())
        throw Error(ErrorKind::ShapeMismatch, "mix_graphs: " + std::to_string(alpha.size()) + " weights for " +
                                                  std::to_string(graphs.view_count()) + " graphs");
    Matrix out = alpha(0) * graphs.graphs.front();
    for (std::size_t v = 1; v < graphs.view_count(); ++v) out += alpha(static_cast<Index>(v)) * graphs.graphs[v];
    return out;
}

Matrix update_Z(const AnchorGraphSet& graphs, const Vector& alpha, const Matrix& F, const Matrix& G, double beta,
                double gamma) {
    Matrix target = mix_graphs(graphs, alpha);
    if (gamma != 0.0) {
        target.noalias() += gamma * (F * G.transpose());
        target /= 1.0 + gamma;
    }
    return svt(target, beta / (2.0 * (1.0 + gamma)));
}

double objective(const SolverState& state, const AnchorGraphSet& graphs, const SolverConfig& config) {
    const double fusion = (state.Z - mix_graphs(graphs, state.alpha)).squaredNorm();
    const double low_rank = config.beta == 0.0 ? 0.0 : config.beta * nuclear_norm(state.Z);
    const double factor =
        config.gamma == 0.0 ? 0.0 : config.gamma * (state.Z - state.F * state.G.transpose()).squaredNorm();
    return fusion + low_rank + factor;
}

Labels labels_from_F(const Matrix& F) {
    Labels labels(static_cast<std::size_t>(F.rows()), 0);
    for (Index i = 0; i < F.rows(); ++i) {
        Index arg = 0;
        for (Index j = 1; j < F.cols(); ++j)
            if (F(i, j) > F(i, arg)) arg = j;
        labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    return labels;
}

namespace detail {

namespace {

ClusteringResult run_once(const AnchorGraphSet& graphs, const SolverConfig& config, bool learn_alpha,
                          const CycleObserver& observer) {
    ClusteringResult result;
    SolverState& state = result.state;
    state = init_state(graphs, config, &result.diagnostics);

    const QpControls qp{config.qp_max_iters, config.qp_tol};
    const Matrix gram = learn_alpha ? graph_gram(graphs) : Matrix();

    double previous = objective(state, graphs, config);
    if (!std::isfinite(previous)) throw Error(ErrorKind::NumericalBreakdown, "initial objective is not finite");
    state.objective_history.push_back(previous);

    for (int it = 1; it <= config.max_iters; ++it) {
        state.F = update_F(state.Z, state.G);
        state.G = update_G(state.Z, state.F, &result.diagnostics);
        state.Z = update_Z(graphs, state.alpha, state.F, state.G, config.beta, config.gamma);
        if (learn_alpha) state.alpha = update_alpha(graphs, gram, state.Z, qp, &state.alpha, &result.diagnostics);

        const double current = objective(state, graphs, config);
        if (!std::isfinite(current))
            throw Error(ErrorKind::NumericalBreakdown, "objective became non-finite at cycle " + std::to_string(it));
        state.objective_history.push_back(current);
        state.iters_run = it;
        if (observer) observer(it, state);

        if (std::abs(current - previous) / std::max(previous, 1e-12) < config.rel_tol) {
            result.converged = true;
            break;
        }
        previous = current;
    }

    result.labels = labels_from_F(state.F);
    return result;
}

} // namespace

ClusteringResult run_solver(const AnchorGraphSet& graphs, const SolverConfig& config, bool learn_alpha,
                            const CycleObserver& observer) {
    const auto started = std::chrono::steady_clock::now();
    validate(config);
    ClusteringResult best;
    Diagnostics diagnostics;
    for (int r = 0; r < config.restarts; ++r) {
        SolverConfig attempt = config;
        attempt.seed = config.seed + static_cast<std::uint64_t>(r);
        ClusteringResult result = run_once(graphs, attempt, learn_alpha, observer);
        diagnostics.merge(result.diagnostics);
        if (r == 0 || result.state.objective_history.back() < best.state.objective_history.back()) {
            best = std::move(result);
            best.restart_used = r;
        }
    }
    best.diagnostics = std::move(diagnostics);
    best.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return best;
}

} // namespace detail

ClusteringResult fit(const AnchorGraphSet& graphs, const SolverConfig& config, const CycleObserver& observer) {
    return detail::run_solver(graphs, config, true, observer);
}

} // namespace omcal
