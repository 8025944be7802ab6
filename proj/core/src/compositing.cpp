#include "drsplat/compositing.hpp"

#include <algorithm>

namespace drsplat {

ViewCache::ViewCache(const Scene& scene, const Camera& cam, const RenderConfig& cfg)
    : cfg_(cfg) {
    sorted_.reserve(scene.size());
    for (std::size_t i = 0; i < scene.size(); ++i) {
        auto proj = project_gaussian(scene.gaussians[i], cam, cfg);
        if (!proj)
            continue;
        sorted_.push_back({static_cast<int>(i), scene.gaussians[i].opacity, *proj});
    }
    std::stable_sort(sorted_.begin(), sorted_.end(), [](const Entry& a, const Entry& b) {
        if (a.proj.depth != b.proj.depth)
            return a.proj.depth < b.proj.depth;
        return a.index < b.index;
    });
}

CompositeResult ViewCache::composite(const Vec2& pixel) const {
    CompositeResult out;
    double t = 1.0;
    for (const Entry& e : sorted_) {
        if (t < cfg_.t_min)
            break;
        const double a = effective_alpha(e.proj, e.opacity, pixel, cfg_);
        if (a <= 0.0)
            continue;
        const double w = t * a;
        out.contributions.push_back({e.index, w});
        // t - w rather than t * (1 - a): the conservation identity
        // sum(w) + T = 1 then telescopes exactly in floating point.
        t = t - w;
    }
    out.final_transmittance = t;
    return out;
}

CompositeResult composite_pixel(const Scene& scene, const Camera& cam, const Vec2& pixel,
                                const RenderConfig& cfg) {
    return ViewCache(scene, cam, cfg).composite(pixel);
}

std::vector<RayContribution> topk_select(const std::vector<RayContribution>& contribs, int k) {
    if (k < 1)
        throw std::invalid_argument("topk_select: k must be >= 1");
    std::vector<RayContribution> out = contribs;
    std::sort(out.begin(), out.end(), [](const RayContribution& a, const RayContribution& b) {
        if (a.weight != b.weight)
            return a.weight > b.weight;
        return a.gaussian_index < b.gaussian_index;
    });
    if (out.size() > static_cast<std::size_t>(k))
        out.resize(static_cast<std::size_t>(k));
    return out;
}

}  // namespace drsplat
