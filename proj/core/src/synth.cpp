#include "drsplat/synth.hpp"

#include "drsplat/compositing.hpp"
#include "drsplat/projection.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace drsplat {

Camera CameraRig::camera(uint32_t view) const {
    const double angle = 2.0 * std::numbers::pi * view / std::max<uint32_t>(views, 1);
    const Vec3 eye = center + radius * Vec3(std::cos(angle), std::sin(angle), elevation);

    Vec3 forward = (center - eye).normalized();  // camera +z
    Vec3 up(0, 0, 1);
    Vec3 right = forward.cross(up);
    if (right.norm() < 1e-9)
        right = Vec3(1, 0, 0);
    right.normalize();
    const Vec3 down = forward.cross(right);  // +y points down the image

    Camera cam;
    cam.width = width;
    cam.height = height;
    const double f = 0.5 * width / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
    cam.fx = cam.fy = f;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    Mat3 rot;
    rot.row(0) = right.transpose();
    rot.row(1) = down.transpose();
    rot.row(2) = forward.transpose();
    cam.world_to_camera.setIdentity();
    cam.world_to_camera.topLeftCorner<3, 3>() = rot;
    cam.world_to_camera.topRightCorner<3, 1>() = -rot * eye;
    return cam;
}

void SceneSpec::validate() const {
    if (label_count == 0 || label_count > gaussian_count)
        throw std::invalid_argument("SceneSpec: label_count must be in [1, gaussian_count]");
    if (embedding_noise < 0.0)
        throw std::invalid_argument("SceneSpec: noise sigma must be >= 0");
    if (rig.views < 1)
        throw std::invalid_argument("SceneSpec: need at least one view");
    if (dim == 0 || scale_min <= 0.0 || scale_max < scale_min)
        throw std::invalid_argument("SceneSpec: bad dimensions or scale range");
}

namespace {

Eigen::VectorXf random_unit(uint32_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (uint32_t i = 0; i < dim; ++i)
        v[i] = normal(rng);
    return (v / v.norm()).cast<float>();
}

MatrixRMf sample_label_embeddings(uint32_t label_count, uint32_t dim,
                                  std::mt19937_64& rng) {
    const float max_cos = 0.5f;  // pairwise angle >= 60 degrees
    MatrixRMf emb(label_count, dim);
    for (uint32_t l = 0; l < label_count; ++l) {
        bool ok = false;
        for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
            emb.row(l) = random_unit(dim, rng).transpose();
            ok = true;
            for (uint32_t j = 0; j < l; ++j)
                if (emb.row(l).dot(emb.row(j)) > max_cos)
                    ok = false;
        }
        if (!ok)
            throw std::invalid_argument(
                "gen_scene: cannot satisfy label angle constraint (D too small?)");
    }
    return emb;
}

}  // namespace

GeneratedScene gen_scene(const SceneSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    GeneratedScene out;
    out.label_embeddings = sample_label_embeddings(spec.label_count, spec.dim, rng);

    // Cluster centers, kept apart so labels stay spatially separable.
    std::vector<Vec3> centers(spec.label_count);
    const double min_sep = 4.0 * spec.cluster_spread;
    for (uint32_t l = 0; l < spec.label_count; ++l) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Vec3 c;
            for (int a = 0; a < 3; ++a)
                c[a] = (2.0 * unit(rng) - 1.0) * spec.layout_extent * 0.5;
            bool ok = true;
            for (uint32_t j = 0; j < l; ++j)
                if ((c - centers[j]).norm() < min_sep)
                    ok = false;
            if (ok || attempt == 999) {
                centers[l] = c;
                break;
            }
        }
    }

    const double log_lo = std::log(spec.scale_min);
    const double log_hi = std::log(spec.scale_max);
    out.scene.gaussians.reserve(spec.gaussian_count);
    for (uint32_t i = 0; i < spec.gaussian_count; ++i) {
        Gaussian3D g;
        g.label = static_cast<int>(i % spec.label_count);
        const Vec3& c = centers[static_cast<uint32_t>(g.label)];
        for (int a = 0; a < 3; ++a)
            g.center[a] = c[a] + normal(rng) * spec.cluster_spread;
        for (int a = 0; a < 3; ++a)
            g.scale[a] = std::exp(log_lo + unit(rng) * (log_hi - log_lo));
        Eigen::Vector4d q;
        for (int a = 0; a < 4; ++a)
            q[a] = normal(rng);
        g.rotation = q / q.norm();
        g.opacity = spec.opacity_min + unit(rng) * (spec.opacity_max - spec.opacity_min);
        for (int a = 0; a < 3; ++a)
            g.color[a] = unit(rng);
        out.scene.gaussians.push_back(g);
    }

    out.point_cloud.label_count = static_cast<int>(spec.label_count);
    out.point_cloud.points.reserve(spec.gaussian_count * spec.points_per_gaussian);
    for (const Gaussian3D& g : out.scene.gaussians) {
        const Mat3 rs = quaternion_to_rotation(g.rotation) * g.scale.asDiagonal();
        for (uint32_t p = 0; p < spec.points_per_gaussian; ++p) {
            Vec3 n;
            for (int a = 0; a < 3; ++a)
                n[a] = normal(rng);
            out.point_cloud.points.push_back(g.center + rs * n);
            out.point_cloud.labels.push_back(g.label);
        }
    }
    return out;
}

MaskDataset render_masks(const Scene& scene, const MatrixRMf& label_embeddings,
                         const CameraRig& rig, double sigma, uint64_t seed,
                         const RenderConfig& cfg) {
    const uint32_t label_count = static_cast<uint32_t>(label_embeddings.rows());
    const uint32_t dim = static_cast<uint32_t>(label_embeddings.cols());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    MaskDataset ds;
    // One global embedding row per (view, label); noisy copies of the
    // label embedding, renormalized.
    ds.embeddings = MatrixRMf(rig.views * label_count, dim);
    for (uint32_t v = 0; v < rig.views; ++v) {
        for (uint32_t l = 0; l < label_count; ++l) {
            Eigen::VectorXd e = label_embeddings.row(l).transpose().cast<double>();
            for (uint32_t k = 0; k < dim; ++k)
                e[k] += sigma * normal(rng);
            ds.embeddings.row(v * label_count + l) = (e / e.norm()).transpose().cast<float>();
        }
    }

    ds.views.resize(rig.views);
    for (uint32_t v = 0; v < rig.views; ++v) {
        MaskView& mv = ds.views[v];
        mv.camera = rig.camera(v);
        mv.mask_map.assign(static_cast<std::size_t>(rig.width) * rig.height, 0);
        for (uint32_t l = 0; l < label_count; ++l)
            mv.mask_table[l + 1] = v * label_count + l;

        const ViewCache cache(scene, mv.camera, cfg);
        for (uint32_t y = 0; y < rig.height; ++y) {
            for (uint32_t x = 0; x < rig.width; ++x) {
                const CompositeResult res = cache.composite(Vec2(x + 0.5, y + 0.5));
                if (res.contributions.empty())
                    continue;
                const RayContribution top = topk_select(res.contributions, 1).front();
                const int label = scene.gaussians[top.gaussian_index].label;
                if (label < 0 || label >= static_cast<int>(label_count))
                    continue;
                mv.mask_map[static_cast<std::size_t>(y) * rig.width + x] =
                    static_cast<uint32_t>(label) + 1;
            }
        }
    }
    return ds;
}

}  // namespace drsplat
