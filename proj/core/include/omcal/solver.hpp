#pragma once

#include "omcal/anchors.hpp"
#include "omcal/dataset.hpp"
#include "omcal/error.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace omcal {

/// Hyperparameters of the consensus-graph objective
///   ||Z - sum_v alpha_v S_v||^2 + beta ||Z||_* + gamma ||Z - F G^T||^2
/// subject to G^T G = I, F >= 0 and alpha on the probability simplex.
struct SolverConfig {
    int clusters = 0;       // c
    double beta = 0.2;      // nuclear-norm weight
    double gamma = 0.1;     // factorization weight
    int max_iters = 200;
    double rel_tol = 1e-6;  // |obj_t - obj_{t-1}| / max(obj_{t-1}, 1e-12)
    std::uint64_t seed = 0;
    int qp_max_iters = 1000;
    double qp_tol = 1e-10;
    /// Independent initializations (seeds seed, seed+1, ...); the run with the
    /// lowest final objective is returned.
    int restarts = 1;
};

void validate(const SolverConfig& config);

struct SolverState {
    Matrix Z;      // n x m consensus anchor graph
    Matrix F;      // n x c non-negative soft indicator
    Matrix G;      // m x c, column-orthonormal
    Vector alpha;  // view weights on the simplex
    std::vector<double> objective_history;
    int iters_run = 0;
};

struct ClusteringResult {
    Labels labels;
    SolverState state;
    double elapsed_seconds = 0.0;
    bool converged = false;
    int restart_used = 0;
    Diagnostics diagnostics;
};

/// Uniform view weights, Z as their mixture, F = |N(0,1)| and G from a thin
/// QR of a Gaussian draw. Requires 1 <= c <= m.
SolverState init_state(const AnchorGraphSet& graphs, const SolverConfig& config, Diagnostics* diag = nullptr);

/// max(Z G, 0): the minimizer of ||Z - F G^T||^2 over F >= 0 for orthonormal G.
Matrix update_F(const Matrix& Z, const Matrix& G);

/// Column-orthonormal G maximizing Tr(G^T W). With W = U S V^T (thin SVD)
/// this is U V^T. Warns when W is rank deficient (the maximizer is then not
/// unique).
Matrix procrustes(const Matrix& W, Diagnostics* diag = nullptr);

/// procrustes(Z^T F).
Matrix update_G(const Matrix& Z, const Matrix& F, Diagnostics* diag = nullptr);

/// Singular value thresholding: prox of tau ||.||_* at M. Computed through
/// the eigendecomposition of the smaller Gram matrix.
Matrix svt(const Matrix& M, double tau);

/// Singular values via Householder QR followed by one-sided Jacobi.
Vector singular_values(const Matrix& A);
double nuclear_norm(const Matrix& A);

/// sum_v alpha_v S_v.
Matrix mix_graphs(const AnchorGraphSet& graphs, const Vector& alpha);

/// svt((sum_v alpha_v S_v + gamma F G^T) / (1 + gamma), beta / (2 (1 + gamma))).
Matrix update_Z(const AnchorGraphSet& graphs, const Vector& alpha, const Matrix& F, const Matrix& G, double beta,
                double gamma);

/// V x V Gram matrix of the vectorized graphs, <S_u, S_v>_F.
Matrix graph_gram(const AnchorGraphSet& graphs);

/// Euclidean projection onto {x >= 0, sum x = 1} (sort-based).
Vector project_to_simplex(const Vector& v);

struct QpControls {
    int max_iters = 1000;
    double tol = 1e-10;
};

struct QpResult {
    Vector x;
    int iterations = 0;
    bool converged = false;
};

/// Minimizes x^T Q x - x^T b over the probability simplex by projected
/// gradient with step 1 / (2 lambda_max(Q)). Q must be symmetric PSD.
QpResult solve_simplex_qp(const Matrix& Q, const Vector& b, const Vector& start, QpControls controls);

/// View weights minimizing ||Z - sum_v alpha_v S_v||^2 on the simplex.
/// `start` defaults to uniform weights.
Vector update_alpha(const AnchorGraphSet& graphs, const Matrix& Z, QpControls controls,
                    const Vector* start = nullptr, Diagnostics* diag = nullptr);

/// Same as above with a precomputed graph_gram(graphs).
Vector update_alpha(const AnchorGraphSet& graphs, const Matrix& gram, const Matrix& Z, QpControls controls,
                    const Vector* start = nullptr, Diagnostics* diag = nullptr);

double objective(const SolverState& state, const AnchorGraphSet& graphs, const SolverConfig& config);

/// Row-wise argmax; ties resolve to the lowest column.
Labels labels_from_F(const Matrix& F);

/// Called after every full cycle with the cycle number (1-based, restarting
/// at 1 for each initialization) and the state.
using CycleObserver = std::function<void(int, const SolverState&)>;

/// Alternates F, G, Z and alpha updates until the relative objective change
/// drops below rel_tol or max_iters cycles have run.
ClusteringResult fit(const AnchorGraphSet& graphs, const SolverConfig& config, const CycleObserver& observer = {});

namespace detail {
ClusteringResult run_solver(const AnchorGraphSet& graphs, const SolverConfig& config, bool learn_alpha,
                            const CycleObserver& observer);
} // namespace detail

} // namespace omcal
