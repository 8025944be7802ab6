#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace drsplat {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat2 = Eigen::Matrix2d;

// Row-major so the memory layout matches the on-disk embedding blocks.
using MatrixRMf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kNoLabel = -1;

/// One splat: anisotropic 3D Gaussian with opacity, color and an
/// optional semantic label.
struct Gaussian3D {
    Vec3 center = Vec3::Zero();
    Vec3 scale = Vec3::Ones();          // positive half-axis lengths
    Eigen::Vector4d rotation{1, 0, 0, 0};  // unit quaternion (w,x,y,z)
    double opacity = 1.0;
    Vec3 color = Vec3::Ones();
    int label = kNoLabel;

    void validate() const {
        if (!(scale.array() > 0).all())
            throw std::invalid_argument("Gaussian3D: scale components must be > 0");
        if (std::abs(rotation.norm() - 1.0) > 1e-6)
            throw std::invalid_argument("Gaussian3D: quaternion must be unit-norm");
        if (opacity < 0.0 || opacity > 1.0)
            throw std::invalid_argument("Gaussian3D: opacity must be in [0,1]");
    }
};

struct Scene {
    std::vector<Gaussian3D> gaussians;

    std::size_t size() const { return gaussians.size(); }
    bool empty() const { return gaussians.empty(); }
};

/// Pinhole camera with a rigid world-to-camera transform.
struct Camera {
    double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
    uint32_t width = 0, height = 0;
    Mat4 world_to_camera = Mat4::Identity();

    Mat3 rotation() const { return world_to_camera.topLeftCorner<3, 3>(); }
    Vec3 translation() const { return world_to_camera.topRightCorner<3, 1>(); }

    void validate() const {
        if (fx <= 0 || fy <= 0)
            throw std::invalid_argument("Camera: focal lengths must be > 0");
        Mat3 r = rotation();
        if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
            throw std::invalid_argument("Camera: rotation block must be orthonormal");
    }
};

struct Projected2D {
    Vec2 mean2d = Vec2::Zero();   // pixels
    Mat2 cov2d = Mat2::Identity();  // pixels^2, after low-pass dilation
    double depth = 0.0;           // camera-frame z
};

struct RayContribution {
    int gaussian_index = 0;
    double weight = 0.0;  // T_i * alpha_tilde_i
};

}  // namespace drsplat
