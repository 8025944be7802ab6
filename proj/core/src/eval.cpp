#include "drsplat/eval.hpp"

#include "drsplat/parallel.hpp"
#include "drsplat/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drsplat {

void LabeledPointCloud::validate() const {
    if (points.empty() || points.size() != labels.size())
        throw std::invalid_argument("LabeledPointCloud: empty or misaligned");
    for (int l : labels)
        if (l < 0 || l >= label_count)
            throw std::invalid_argument("LabeledPointCloud: label out of range");
}

CovarianceInverse regularized_covariance_inverse(const Gaussian3D& g, double epsilon) {
    const Mat3 rot = quaternion_to_rotation(g.rotation);
    const Vec3 s2 = g.scale.array().square() + epsilon;
    CovarianceInverse out;
    out.inverse = rot * s2.cwiseInverse().asDiagonal() * rot.transpose();
    out.det = s2.prod();
    if (!(out.det > 0.0) || !std::isfinite(out.det))
        throw std::runtime_error("covariance inverse: degenerate covariance");
    return out;
}

double mahalanobis_distance(const Vec3& p, const Gaussian3D& g, double epsilon) {
    const CovarianceInverse ci = regularized_covariance_inverse(g, epsilon);
    const Vec3 d = p - g.center;
    return d.dot(ci.inverse * d);
}

std::vector<int> pseudo_label_gaussians(const LabeledPointCloud& pc, const Scene& scene,
                                        PseudoLabelMode mode, int threads) {
    pc.validate();
    std::vector<int> out(scene.size(), 0);
    parallel_for(0, scene.size(), [&](std::size_t lo, std::size_t hi) {
        std::vector<double> acc(static_cast<std::size_t>(pc.label_count));
        for (std::size_t i = lo; i < hi; ++i) {
            const CovarianceInverse ci = regularized_covariance_inverse(scene.gaussians[i]);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t k = 0; k < pc.size(); ++k) {
                const Vec3 d = pc.points[k] - scene.gaussians[i].center;
                const double m = d.dot(ci.inverse * d);
                acc[static_cast<std::size_t>(pc.labels[k])] +=
                    mode == PseudoLabelMode::kAffinity ? std::exp(-0.5 * m) : m;
            }
            int best = 0;
            for (int l = 1; l < pc.label_count; ++l)
                if (acc[static_cast<std::size_t>(l)] > acc[static_cast<std::size_t>(best)])
                    best = l;
            out[i] = best;
        }
    }, threads);
    return out;
}

double significant_score(const Gaussian3D& g) {
    return g.scale.prod() * g.opacity;
}

std::vector<double> significant_scores(const Scene& scene) {
    std::vector<double> out(scene.size());
    for (std::size_t i = 0; i < scene.size(); ++i)
        out[i] = significant_score(scene.gaussians[i]);
    return out;
}

std::optional<double> weighted_iou(const std::vector<int>& pred, const std::vector<int>& gt,
                                   const std::vector<double>& d, int label) {
    if (pred.size() != gt.size() || pred.size() != d.size())
        throw std::invalid_argument("weighted_iou: length mismatch");
    double inter = 0.0, uni = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == label;
        const bool g = gt[i] == label;
        if (p && g)
            inter += d[i];
        if (p || g)
            uni += d[i];
    }
    if (uni == 0.0)
        return std::nullopt;
    return inter / uni;
}

double mean_iou(const std::vector<int>& pred, const std::vector<int>& gt,
                const std::vector<double>& d, int label_count) {
    double sum = 0.0;
    int defined = 0;
    for (int l = 0; l < label_count; ++l) {
        if (auto iou = weighted_iou(pred, gt, d, l)) {
            sum += *iou;
            ++defined;
        }
    }
    return defined > 0 ? sum / defined : 0.0;
}

namespace {

constexpr double kGaussNorm3D = 0.06349363593424097;  // (2*pi)^(-3/2)

double density_at(const Vec3& v, const Gaussian3D& g, const CovarianceInverse& ci,
                  double cutoff_sq) {
    const Vec3 d = v - g.center;
    const double m = d.dot(ci.inverse * d);
    if (m > cutoff_sq)
        return 0.0;
    return std::exp(-0.5 * m) * kGaussNorm3D / std::sqrt(ci.det);
}

}  // namespace

std::vector<double> voxel_label_scores(const Vec3& v, const Scene& scene, int label_count,
                                       const std::vector<int>* labels_override,
                                       double cutoff_sq, double epsilon) {
    std::vector<double> scores(static_cast<std::size_t>(label_count), 0.0);
    for (std::size_t i = 0; i < scene.size(); ++i) {
        const Gaussian3D& g = scene.gaussians[i];
        const int label = labels_override ? (*labels_override)[i] : g.label;
        if (label < 0 || label >= label_count)
            continue;
        const CovarianceInverse ci = regularized_covariance_inverse(g, epsilon);
        scores[static_cast<std::size_t>(label)] +=
            g.opacity * density_at(v, g, ci, cutoff_sq);
    }
    return scores;
}

VoxelGrid voxelize_scene(const Scene& scene, const Vec3& bounds_min, const Vec3& bounds_max,
                         double spacing, int label_count,
                         const std::vector<int>* labels_override,
                         const VoxelizeOptions& opt) {
    if (spacing <= 0.0)
        throw std::invalid_argument("voxelize_scene: spacing must be > 0");
    VoxelGrid grid;
    grid.origin = bounds_min;
    grid.spacing = spacing;
    grid.label_count = label_count;
    for (int a = 0; a < 3; ++a)
        grid.dims[a] = std::max(1, static_cast<int>(
            std::ceil((bounds_max[a] - bounds_min[a]) / spacing)));
    if (grid.cell_count() > opt.cell_budget)
        throw std::runtime_error("voxelize_scene: grid exceeds cell budget");

    const std::size_t cells = grid.cell_count();
    grid.scores.assign(cells * static_cast<std::size_t>(label_count), 0.0f);
    grid.density.assign(cells, 0.0f);
    grid.labels.assign(cells, kNoLabel);

    // Per-Gaussian conservative cell bounding boxes (3 sigma along axes).
    struct Box {
        int lo[3], hi[3];  // inclusive cell ranges
        Mat3 cov_inv;
        Vec3 center;
        double amplitude;  // alpha * (2pi)^(-3/2) / sqrt(det)
        int label;
    };
    std::vector<Box> boxes;
    boxes.reserve(scene.size());
    const double sigma_mult = std::sqrt(opt.cutoff_sq);
    for (std::size_t i = 0; i < scene.size(); ++i) {
        const Gaussian3D& g = scene.gaussians[i];
        Box b;
        b.label = labels_override ? (*labels_override)[i] : g.label;
        if (b.label < 0 || b.label >= label_count)
            continue;
        const CovarianceInverse ci = regularized_covariance_inverse(g);
        b.cov_inv = ci.inverse;
        b.center = g.center;
        b.amplitude = g.opacity * kGaussNorm3D / std::sqrt(ci.det);
        const Mat3 cov = build_covariance(g.scale, g.rotation);
        bool off_grid = false;
        for (int a = 0; a < 3; ++a) {
            const double ext = sigma_mult * std::sqrt(cov(a, a));
            const double lo = (g.center[a] - ext - grid.origin[a]) / spacing - 0.5;
            const double hi = (g.center[a] + ext - grid.origin[a]) / spacing - 0.5;
            b.lo[a] = std::max(0, static_cast<int>(std::floor(lo)));
            b.hi[a] = std::min(grid.dims[a] - 1, static_cast<int>(std::ceil(hi)));
            if (b.lo[a] > b.hi[a])
                off_grid = true;
        }
        if (!off_grid)
            boxes.push_back(b);
    }

    // Workers own disjoint z-slabs; each cell is written by exactly one
    // worker, in Gaussian index order, so the result is thread-count
    // independent.
    parallel_for(0, static_cast<std::size_t>(grid.dims.z()),
                 [&](std::size_t zlo, std::size_t zhi) {
        for (const Box& b : boxes) {
            const int z0 = std::max(b.lo[2], static_cast<int>(zlo));
            const int z1 = std::min(b.hi[2], static_cast<int>(zhi) - 1);
            for (int iz = z0; iz <= z1; ++iz) {
                for (int iy = b.lo[1]; iy <= b.hi[1]; ++iy) {
                    for (int ix = b.lo[0]; ix <= b.hi[0]; ++ix) {
                        const Vec3 d = grid.center(ix, iy, iz) - b.center;
                        const double m = d.dot(b.cov_inv * d);
                        if (m > opt.cutoff_sq)
                            continue;
                        const std::size_t cell =
                            (static_cast<std::size_t>(iz) * grid.dims.y() + iy) *
                                grid.dims.x() + ix;
                        grid.scores[cell * label_count + b.label] +=
                            static_cast<float>(b.amplitude * std::exp(-0.5 * m));
                    }
                }
            }
        }
    }, opt.threads);

    double max_density = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
        double p = 0.0;
        for (int l = 0; l < label_count; ++l)
            p += grid.scores[j * label_count + l];
        grid.density[j] = static_cast<float>(p);
        if (p > max_density)
            max_density = p;
    }
    const double threshold = opt.density_threshold_rel * max_density;
    for (std::size_t j = 0; j < cells; ++j) {
        if (grid.density[j] < threshold || grid.density[j] <= 0.0f)
            continue;
        int best = 0;
        for (int l = 1; l < label_count; ++l)
            if (grid.scores[j * label_count + l] > grid.scores[j * label_count + best])
                best = l;
        grid.labels[j] = best;
    }
    return grid;
}

std::optional<double> voxel_iou(const VoxelGrid& gt, const VoxelGrid& pred, int label) {
    if (!gt.same_geometry(pred))
        throw std::invalid_argument("voxel_iou: grid geometry mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t j = 0; j < gt.labels.size(); ++j) {
        const bool a = gt.labels[j] == label;
        const bool b = pred.labels[j] == label;
        if (a && b)
            ++inter;
        if (a || b)
            ++uni;
    }
    if (uni == 0)
        return std::nullopt;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double voxel_mean_iou(const VoxelGrid& gt, const VoxelGrid& pred, int label_count) {
    double sum = 0.0;
    int defined = 0;
    for (int l = 0; l < label_count; ++l) {
        if (auto iou = voxel_iou(gt, pred, l)) {
            sum += *iou;
            ++defined;
        }
    }
    return defined > 0 ? sum / defined : 0.0;
}

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson: need two aligned series");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0)
        return std::nullopt;
    return cov / std::sqrt(va * vb);
}

}  // namespace drsplat
