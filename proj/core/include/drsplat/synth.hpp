#pragma once

#include "drsplat/eval.hpp"
#include "drsplat/registration.hpp"
#include "drsplat/types.hpp"

#include <cstdint>

namespace drsplat {

/// Ring of cameras around a look-at point.
struct CameraRig {
    uint32_t views = 8;
    double radius = 20.0;
    double elevation = 0.35;    // eye z-offset as a fraction of radius
    uint32_t width = 64, height = 64;
    double fov_deg = 60.0;
    Vec3 center = Vec3::Zero();

    Camera camera(uint32_t view) const;
};

/// Controls for the synthetic scene generator. The generator doubles as
/// the ground-truth oracle: every Gaussian carries its label, label
/// embeddings are near-orthogonal, and the point cloud is sampled from
/// the Gaussians themselves.
struct SceneSpec {
    uint64_t seed = 0;
    uint32_t gaussian_count = 200;
    uint32_t label_count = 4;
    uint32_t dim = 512;              // embedding dimension D
    double embedding_noise = 0.05;   // sigma added per mask embedding
    double layout_extent = 8.0;      // cluster centers sampled in this cube
    double cluster_spread = 0.8;
    double scale_min = 0.08, scale_max = 0.45;  // log-uniform per axis
    double opacity_min = 0.6, opacity_max = 0.95;
    uint32_t points_per_gaussian = 20;
    CameraRig rig;

    void validate() const;
};

struct GeneratedScene {
    Scene scene;             // labels filled from the generator
    MatrixRMf label_embeddings;  // label_count x dim, unit rows
    LabeledPointCloud point_cloud;
};

/// Deterministic given the seed (single RNG stream, fixed draw order).
GeneratedScene gen_scene(const SceneSpec& spec);

/// Synthesizes a mask dataset from a labeled scene: per view, each
/// pixel's mask id is the ground-truth label of its highest-weight
/// Gaussian, one mask region per (view, label), and each mask embedding
/// is the label embedding plus Gaussian noise sigma, renormalized.
MaskDataset render_masks(const Scene& scene, const MatrixRMf& label_embeddings,
                         const CameraRig& rig, double sigma, uint64_t seed,
                         const RenderConfig& cfg = {});

}  // namespace drsplat
