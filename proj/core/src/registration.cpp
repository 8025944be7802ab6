#include "drsplat/registration.hpp"

#include "drsplat/parallel.hpp"

#include <cmath>

namespace drsplat {

void MaskDataset::validate() const {
    for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
        if (std::abs(embeddings.row(i).norm() - 1.0f) > 1e-5f)
            throw std::invalid_argument("MaskDataset: embedding rows must be unit-norm");
    }
    for (std::size_t v = 0; v < views.size(); ++v) {
        const MaskView& mv = views[v];
        if (mv.mask_map.size() !=
            static_cast<std::size_t>(mv.camera.width) * mv.camera.height)
            throw std::invalid_argument("MaskDataset: mask map size mismatch");
        for (uint32_t id : mv.mask_map) {
            if (id == 0)
                continue;
            auto it = mv.mask_table.find(id);
            if (it == mv.mask_table.end() || it->second >= mask_count())
                throw std::invalid_argument("MaskDataset: unresolved mask id");
        }
    }
}

void WeightMatrix::merge(const WeightMatrix& other) {
    if (other.rows_.size() != rows_.size())
        throw std::invalid_argument("WeightMatrix::merge: size mismatch");
    for (std::size_t i = 0; i < rows_.size(); ++i)
        for (const auto& [mask, w] : other.rows_[i])
            rows_[i][mask] += w;
}

double WeightMatrix::row_sum(std::size_t gaussian) const {
    double s = 0.0;
    for (const auto& [mask, w] : rows_[gaussian])
        s += w;
    return s;
}

std::optional<Eigen::VectorXf> pixel_embedding(const MaskDataset& ds, std::size_t view,
                                               uint32_t x, uint32_t y) {
    const MaskView& mv = ds.views.at(view);
    if (x >= mv.camera.width || y >= mv.camera.height)
        throw std::invalid_argument("pixel_embedding: pixel out of bounds");
    const uint32_t id = mv.mask_at(x, y);
    if (id == 0)
        return std::nullopt;
    return ds.embeddings.row(mv.mask_table.at(id)).transpose();
}

namespace {

void accumulate_view(const Scene& scene, const MaskView& mv, int k,
                     const RenderConfig& cfg, WeightMatrix& out) {
    const ViewCache cache(scene, mv.camera, cfg);
    for (uint32_t y = 0; y < mv.camera.height; ++y) {
        for (uint32_t x = 0; x < mv.camera.width; ++x) {
            const uint32_t id = mv.mask_at(x, y);
            if (id == 0)
                continue;
            const uint32_t mask_row = mv.mask_table.at(id);
            // rays at pixel centers
            const Vec2 pixel(x + 0.5, y + 0.5);
            const CompositeResult res = cache.composite(pixel);
            if (res.contributions.empty())
                continue;
            for (const RayContribution& c : topk_select(res.contributions, k))
                out.add(static_cast<std::size_t>(c.gaussian_index), mask_row, c.weight);
        }
    }
}

}  // namespace

WeightMatrix accumulate_weights(const Scene& scene, const MaskDataset& ds, int k,
                                const RenderConfig& cfg, int threads) {
    if (k < 1)
        throw std::invalid_argument("accumulate_weights: k must be >= 1");
    WeightMatrix total(scene.size());
    if (threads == 1) {
        for (const MaskView& mv : ds.views)
            accumulate_view(scene, mv, k, cfg, total);
        return total;
    }
    std::vector<WeightMatrix> partials(ds.views.size(), WeightMatrix(scene.size()));
    parallel_for(0, ds.views.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t v = lo; v < hi; ++v)
            accumulate_view(scene, ds.views[v], k, cfg, partials[v]);
    }, threads);
    for (const WeightMatrix& p : partials)
        total.merge(p);
    return total;
}

AggregatedFeatures aggregate_features(const WeightMatrix& w, const MatrixRMf& embeddings) {
    const std::size_t n = w.gaussian_count();
    const Eigen::Index d = embeddings.cols();
    AggregatedFeatures out;
    out.features = MatrixRMf::Zero(static_cast<Eigen::Index>(n), d);
    out.assigned.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = w.row(i);
        double sum = 0.0;
        for (const auto& [mask, wij] : row)
            sum += wij;
        if (sum <= 0.0)
            continue;
        Eigen::VectorXd f = Eigen::VectorXd::Zero(d);
        for (const auto& [mask, wij] : row)
            f += (wij / sum) * embeddings.row(static_cast<Eigen::Index>(mask))
                                   .transpose().cast<double>();
        const double norm = f.norm();
        if (norm == 0.0) {
            ++out.cancellation_warnings;
            continue;
        }
        out.features.row(static_cast<Eigen::Index>(i)) = (f / norm).transpose().cast<float>();
        out.assigned[i] = true;
    }
    return out;
}

RegisteredScene prune_unassigned(const Scene& scene, const AggregatedFeatures& agg) {
    if (agg.assigned.size() != scene.size())
        throw std::invalid_argument("prune_unassigned: size mismatch");
    RegisteredScene out;
    for (std::size_t i = 0; i < scene.size(); ++i) {
        if (!agg.assigned[i])
            continue;
        out.survivor_map.push_back(static_cast<int>(i));
        out.scene.gaussians.push_back(scene.gaussians[i]);
    }
    if (out.scene.empty())
        throw std::runtime_error("prune_unassigned: all Gaussians pruned");
    out.features = MatrixRMf(static_cast<Eigen::Index>(out.scene.size()), agg.features.cols());
    for (std::size_t i = 0; i < out.survivor_map.size(); ++i)
        out.features.row(static_cast<Eigen::Index>(i)) =
            agg.features.row(out.survivor_map[i]);
    return out;
}

}  // namespace drsplat
