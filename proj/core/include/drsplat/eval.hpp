#pragma once

#include "drsplat/types.hpp"

#include <optional>
#include <vector>

namespace drsplat {

struct LabeledPointCloud {
    std::vector<Vec3> points;
    std::vector<int> labels;
    int label_count = 0;

    std::size_t size() const { return points.size(); }
    void validate() const;
};

enum class PseudoLabelMode {
    kAffinity,       // argmax of sum exp(-1/2 d_mahal), default
    kPaperVerbatim,  // argmax of summed Mahalanobis distances, as written
};

/// Inverse and determinant of the regularized 3D covariance
/// (epsilon added to each squared scale before inversion).
struct CovarianceInverse {
    Mat3 inverse;
    double det;
};
CovarianceInverse regularized_covariance_inverse(const Gaussian3D& g, double epsilon = 1e-8);

double mahalanobis_distance(const Vec3& p, const Gaussian3D& g, double epsilon = 1e-8);

/// Per-Gaussian semantic labels from a labeled point cloud.
std::vector<int> pseudo_label_gaussians(const LabeledPointCloud& pc, const Scene& scene,
                                        PseudoLabelMode mode = PseudoLabelMode::kAffinity,
                                        int threads = 1);

/// d_i = s_x * s_y * s_z * alpha (relative ellipsoid volume x opacity).
double significant_score(const Gaussian3D& g);
std::vector<double> significant_scores(const Scene& scene);

/// Volume-weighted IoU for one label; nullopt when the union is empty
/// (excluded from mIoU averaging, not counted as zero). Label entries
/// that should not match anything (e.g. pruned Gaussians) may be any
/// value outside [0, label_count).
std::optional<double> weighted_iou(const std::vector<int>& pred, const std::vector<int>& gt,
                                   const std::vector<double>& d, int label);

/// Mean of defined per-label IoUs over labels [0, label_count).
double mean_iou(const std::vector<int>& pred, const std::vector<int>& gt,
                const std::vector<double>& d, int label_count);

struct VoxelGrid {
    Vec3 origin = Vec3::Zero();
    double spacing = 1.0;
    Eigen::Vector3i dims = Eigen::Vector3i::Zero();
    int label_count = 0;
    std::vector<float> scores;    // dims.prod() x label_count, voxel-major
    std::vector<float> density;   // p_j = sum_n l_jn
    std::vector<int> labels;      // argmax, or kNoLabel for empty voxels

    std::size_t cell_count() const {
        return static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
    }
    Vec3 center(int ix, int iy, int iz) const {
        return origin + spacing * Vec3(ix + 0.5, iy + 0.5, iz + 0.5);
    }
    bool same_geometry(const VoxelGrid& o) const {
        return dims == o.dims && (origin - o.origin).norm() < 1e-12 &&
               spacing == o.spacing && label_count == o.label_count;
    }
};

/// Per-label opacity-weighted Gaussian density at one point:
/// l_n = sum_{i: label=n} alpha_i * N(v | mu_i, Sigma_i), with the
/// normalized density and the 3-sigma cutoff.
std::vector<double> voxel_label_scores(const Vec3& v, const Scene& scene, int label_count,
                                       const std::vector<int>* labels_override = nullptr,
                                       double cutoff_sq = 9.0, double epsilon = 1e-8);

struct VoxelizeOptions {
    double density_threshold_rel = 1e-4;  // relative to the grid max density
    double cutoff_sq = 9.0;
    std::size_t cell_budget = 10'000'000;
    int threads = 1;
};

/// Samples voxel centers over [bounds_min, bounds_max], scores every cell
/// and labels non-empty cells by argmax. labels_override substitutes the
/// per-Gaussian labels (e.g. predictions) without copying the scene.
VoxelGrid voxelize_scene(const Scene& scene, const Vec3& bounds_min, const Vec3& bounds_max,
                         double spacing, int label_count,
                         const std::vector<int>* labels_override = nullptr,
                         const VoxelizeOptions& opt = {});

/// Unweighted voxel-count IoU for one label over voxels non-empty in
/// either grid; nullopt when the union is empty.
std::optional<double> voxel_iou(const VoxelGrid& gt, const VoxelGrid& pred, int label);

double voxel_mean_iou(const VoxelGrid& gt, const VoxelGrid& pred, int label_count);

/// Pearson correlation; nullopt when either series has zero variance.
std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace drsplat
