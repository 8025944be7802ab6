#pragma once

#include "drsplat/compositing.hpp"
#include "drsplat/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace drsplat {

/// One training view: camera, mask-id grid and the local-id to global
/// embedding-row mapping. Mask id 0 means unmasked.
struct MaskView {
    Camera camera;
    std::vector<uint32_t> mask_map;  // row-major height x width
    std::map<uint32_t, uint32_t> mask_table;  // local mask id -> global row

    uint32_t mask_at(uint32_t x, uint32_t y) const {
        return mask_map[static_cast<std::size_t>(y) * camera.width + x];
    }
};

/// Per-image masks plus the global table of unit mask embeddings.
struct MaskDataset {
    std::vector<MaskView> views;
    MatrixRMf embeddings;  // M x D, unit rows

    uint32_t dim() const { return static_cast<uint32_t>(embeddings.cols()); }
    uint32_t mask_count() const { return static_cast<uint32_t>(embeddings.rows()); }
    void validate() const;
};

/// Sparse nonnegative N x M weight matrix. Rows keyed by Gaussian,
/// columns by global mask row; kept ordered for deterministic merges.
class WeightMatrix {
public:
    explicit WeightMatrix(std::size_t gaussian_count) : rows_(gaussian_count) {}

    void add(std::size_t gaussian, uint32_t mask, double w) { rows_[gaussian][mask] += w; }
    void merge(const WeightMatrix& other);

    const std::map<uint32_t, double>& row(std::size_t gaussian) const { return rows_[gaussian]; }
    double row_sum(std::size_t gaussian) const;
    std::size_t gaussian_count() const { return rows_.size(); }

private:
    std::vector<std::map<uint32_t, double>> rows_;
};

struct RegisteredScene {
    Scene scene;                       // survivors only
    MatrixRMf features;                // N' x D unit embeddings (full mode)
    std::vector<std::vector<uint8_t>> codes;  // N' PQ codes (PQ mode), else empty
    std::vector<int> survivor_map;     // new index -> original index

    bool has_codes() const { return !codes.empty(); }
    std::size_t size() const { return scene.size(); }
};

/// Embedding of the mask covering a pixel, or nullopt for id 0.
std::optional<Eigen::VectorXf> pixel_embedding(const MaskDataset& ds, std::size_t view,
                                               uint32_t x, uint32_t y);

/// Walks every masked pixel of every view, composites, keeps the Top-k
/// contributions and accumulates their weights against the pixel's mask.
/// Single-threaded when threads == 1 (bitwise deterministic); otherwise
/// parallel over views with per-view partials merged in view order.
WeightMatrix accumulate_weights(const Scene& scene, const MaskDataset& ds, int k,
                                const RenderConfig& cfg = {}, int threads = 1);

/// Weighted average of mask embeddings per Gaussian, renormalized.
/// Rows with zero weight (or exact cancellation) stay unassigned (row of
/// NaN is never produced; unassigned rows are zero).
struct AggregatedFeatures {
    MatrixRMf features;           // N x D, zero rows for unassigned
    std::vector<bool> assigned;   // per Gaussian
    int cancellation_warnings = 0;
};
AggregatedFeatures aggregate_features(const WeightMatrix& w, const MatrixRMf& embeddings);

/// Drops unassigned Gaussians; survivor_map is injective and
/// order-preserving. Throws when nothing survives.
RegisteredScene prune_unassigned(const Scene& scene, const AggregatedFeatures& agg);

}  // namespace drsplat
