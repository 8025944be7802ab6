#pragma once

#include "drsplat/types.hpp"

#include <optional>

namespace drsplat {

/// Rasterization constants. Defaults follow common splatting practice;
/// all of them are tunable.
struct RenderConfig {
    double near_plane = 0.01;
    double lowpass = 0.3;        // added to both cov2d diagonal entries, px^2
    double alpha_clamp = 0.99;
    double alpha_min = 1.0 / 255.0;
    double cutoff_sq = 9.0;      // skip beyond 3 sigma
    double t_min = 1e-4;         // transmittance early stop
};

Mat3 quaternion_to_rotation(const Eigen::Vector4d& q_wxyz);

/// Sigma_3D = R * S * S^T * R^T.
Mat3 build_covariance(const Vec3& scale, const Eigen::Vector4d& rotation);

/// Perspective EWA projection of one Gaussian. Returns nullopt when the
/// center is behind the near plane.
std::optional<Projected2D> project_gaussian(const Gaussian3D& g, const Camera& cam,
                                            const RenderConfig& cfg = {});

/// alpha_tilde = opacity * exp(-1/2 d^T Sigma2D^-1 d), clamped and with
/// the low-alpha / spatial cutoffs applied.
double effective_alpha(const Projected2D& p, double opacity, const Vec2& pixel,
                       const RenderConfig& cfg = {});

}  // namespace drsplat
