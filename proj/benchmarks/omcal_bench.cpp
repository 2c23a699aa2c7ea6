#include <benchmark/benchmark.h>

#include <omcal/omcal.hpp>

#include <random>

using namespace omcal;

namespace {

MultiViewDataset blobs(Index n) {
    BlobsParams p;
    p.n = n;
    p.clusters = 5;
    p.dims = {20, 20};
    p.noise = 1.0;
    return synth_blobs(p);
}

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

} // namespace

static void BM_SelectAnchors(benchmark::State& state) {
    const MultiViewDataset ds = blobs(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(select_anchors(ds, 30, 0));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SelectAnchors)->RangeMultiplier(2)->Range(2048, 16384)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_BuildAnchorGraphs(benchmark::State& state) {
    const MultiViewDataset ds = blobs(state.range(0));
    const AnchorSet anchors = select_anchors(ds, 30, 0);
    for (auto _ : state) benchmark::DoNotOptimize(build_all(ds, anchors, 5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildAnchorGraphs)->RangeMultiplier(2)->Range(2048, 16384)->Unit(benchmark::kMillisecond)->Complexity();

// svt on the n x m shape the Z update sees.
static void BM_Svt(benchmark::State& state) {
    const Matrix m = gaussian(state.range(0), 30, 1);
    for (auto _ : state) benchmark::DoNotOptimize(svt(m, 0.5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Svt)->RangeMultiplier(4)->Range(1024, 65536)->Unit(benchmark::kMicrosecond)->Complexity();

static void BM_NuclearNorm(benchmark::State& state) {
    const Matrix m = gaussian(state.range(0), 30, 2);
    for (auto _ : state) benchmark::DoNotOptimize(nuclear_norm(m));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NuclearNorm)->RangeMultiplier(4)->Range(1024, 65536)->Unit(benchmark::kMicrosecond)->Complexity();

// One full F, G, Z, alpha cycle plus the objective, as fit runs it.
static void BM_FitCycle(benchmark::State& state) {
    const MultiViewDataset ds = blobs(state.range(0));
    const AnchorGraphSet graphs = build_all(ds, select_anchors(ds, 30, 0), 5);
    SolverConfig config;
    config.clusters = 5;
    SolverState s = init_state(graphs, config);
    const Matrix gram = graph_gram(graphs);
    for (auto _ : state) {
        s.F = update_F(s.Z, s.G);
        s.G = update_G(s.Z, s.F);
        s.Z = update_Z(graphs, s.alpha, s.F, s.G, config.beta, config.gamma);
        s.alpha = update_alpha(graphs, gram, s.Z, QpControls{}, &s.alpha);
        benchmark::DoNotOptimize(objective(s, graphs, config));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitCycle)->RangeMultiplier(2)->Range(2048, 16384)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_Fit(benchmark::State& state) {
    const MultiViewDataset ds = blobs(state.range(0));
    const AnchorGraphSet graphs = build_all(ds, select_anchors(ds, 30, 0), 5);
    SolverConfig config;
    config.clusters = 5;
    for (auto _ : state) benchmark::DoNotOptimize(fit(graphs, config));
}
BENCHMARK(BM_Fit)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
