#include "omcal/dataset.hpp"

#include "omcal/error.hpp"

#include <random>

namespace omcal {

MultiViewDataset synth_blobs(const BlobsParams& p) {
    if (p.clusters < 1 || p.n < p.clusters)
        throw Error(ErrorKind::InvalidParameter, "synth_blobs: requires n >= c >= 1");
    if (p.dims.empty()) throw Error(ErrorKind::InvalidParameter, "synth_blobs: at least one view required");
    if (!(p.separation > 0.0)) throw Error(ErrorKind::InvalidParameter, "synth_blobs: separation must be > 0");
    if (!(p.noise >= 0.0)) throw Error(ErrorKind::InvalidParameter, "synth_blobs: noise must be >= 0");

    MultiViewDataset ds;
    Labels labels(static_cast<std::size_t>(p.n));
    for (Index i = 0; i < p.n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i * p.clusters / p.n);

    for (std::size_t v = 0; v < p.dims.size(); ++v) {
        const Index d = p.dims[v];
        if (d < 1) throw Error(ErrorKind::InvalidParameter, "synth_blobs: dims must be >= 1");
        std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                          static_cast<std::uint32_t>(v)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);

        Matrix centers(p.clusters, d);
        for (Index c = 0; c < centers.rows(); ++c)
            for (Index j = 0; j < d; ++j) centers(c, j) = p.separation * normal(rng);

        Matrix x(p.n, d);
        for (Index i = 0; i < p.n; ++i) {
            const int c = labels[static_cast<std::size_t>(i)];
            for (Index j = 0; j < d; ++j) {
                const double eps = p.noise > 0.0 ? p.noise * normal(rng) : 0.0;
                x(i, j) = centers(c, j) + eps;
            }
        }
        ds.views.push_back(std::move(x));
        ds.view_names.push_back("view" + std::to_string(v));
    }
    ds.labels = std::move(labels);
    return ds;
}

} // namespace omcal
