#pragma once

#include "omcal/solver.hpp"

namespace omcal {

/// Single-view variant: low-rank learning of one anchor graph S jointly with
/// the indicator factorization,
///   ||Z - S||^2 + beta ||Z||_* + gamma ||Z - F G^T||^2.
/// Runs the F/G/Z cycle of `fit` with the view weight fixed at 1, so the
/// result matches `fit` on the singleton graph set exactly.
ClusteringResult fit_single(const Matrix& S, const SolverConfig& config, const CycleObserver& observer = {});

} // namespace omcal
