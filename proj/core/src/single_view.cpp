#include "omcal/single_view.hpp"

namespace omcal {

ClusteringResult fit_single(const Matrix& S, const SolverConfig& config, const CycleObserver& observer) {
    AnchorGraphSet graphs;
    graphs.graphs.push_back(S);
    return detail::run_solver(graphs, config, false, observer);
}

} // namespace omcal
