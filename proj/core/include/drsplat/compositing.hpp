#pragma once

#include "drsplat/projection.hpp"
#include "drsplat/types.hpp"

#include <vector>

namespace drsplat {

struct CompositeResult {
    std::vector<RayContribution> contributions;  // only entries with w > 0
    double final_transmittance = 1.0;
};

/// Per-view projection cache: every Gaussian projected once and sorted
/// front-to-back by center depth (ties by ascending index). Compositing
/// many pixels of the same view should go through this.
class ViewCache {
public:
    ViewCache(const Scene& scene, const Camera& cam, const RenderConfig& cfg = {});

    CompositeResult composite(const Vec2& pixel) const;

    const RenderConfig& config() const { return cfg_; }

private:
    struct Entry {
        int index;
        double opacity;
        Projected2D proj;
    };
    std::vector<Entry> sorted_;
    RenderConfig cfg_;
};

/// Front-to-back alpha compositing at a single pixel.
/// Sum of weights + final transmittance telescopes to 1 exactly.
CompositeResult composite_pixel(const Scene& scene, const Camera& cam, const Vec2& pixel,
                                const RenderConfig& cfg = {});

/// The k largest-weight contributions (ties by ascending index),
/// output in descending weight order.
std::vector<RayContribution> topk_select(const std::vector<RayContribution>& contribs, int k);

}  // namespace drsplat
