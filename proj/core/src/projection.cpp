#include "drsplat/projection.hpp"

#include <cmath>

namespace drsplat {

Mat3 quaternion_to_rotation(const Eigen::Vector4d& q_wxyz) {
    const double w = q_wxyz[0], x = q_wxyz[1], y = q_wxyz[2], z = q_wxyz[3];
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

Mat3 build_covariance(const Vec3& scale, const Eigen::Vector4d& rotation) {
    if (!(scale.array() > 0).all())
        throw std::invalid_argument("build_covariance: scale components must be > 0");
    Mat3 r = quaternion_to_rotation(rotation);
    Mat3 m = r * scale.asDiagonal();
    return m * m.transpose();
}

std::optional<Projected2D> project_gaussian(const Gaussian3D& g, const Camera& cam,
                                            const RenderConfig& cfg) {
    const Mat3 w = cam.rotation();
    const Vec3 t = w * g.center + cam.translation();
    if (t.z() <= cfg.near_plane)
        return std::nullopt;

    const double z = t.z();
    Projected2D out;
    out.depth = z;
    out.mean2d = Vec2(cam.fx * t.x() / z + cam.cx, cam.fy * t.y() / z + cam.cy);

    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx / z, 0, -cam.fx * t.x() / (z * z),
           0, cam.fy / z, -cam.fy * t.y() / (z * z);

    const Mat3 cov3d = build_covariance(g.scale, g.rotation);
    Eigen::Matrix<double, 2, 3> jw = jac * w;
    Mat2 cov2d = jw * cov3d * jw.transpose();
    cov2d(0, 0) += cfg.lowpass;
    cov2d(1, 1) += cfg.lowpass;
    out.cov2d = cov2d;
    return out;
}

double effective_alpha(const Projected2D& p, double opacity, const Vec2& pixel,
                       const RenderConfig& cfg) {
    const Mat2& c = p.cov2d;
    const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    if (det <= 0.0)
        throw std::runtime_error("effective_alpha: degenerate 2D covariance");
    const Vec2 d = pixel - p.mean2d;
    const double maha =
        (c(1, 1) * d.x() * d.x() - (c(0, 1) + c(1, 0)) * d.x() * d.y() +
         c(0, 0) * d.y() * d.y()) / det;
    if (maha > cfg.cutoff_sq)
        return 0.0;
    double a = opacity * std::exp(-0.5 * maha);
    if (a > cfg.alpha_clamp)
        a = cfg.alpha_clamp;
    if (a < cfg.alpha_min)
        return 0.0;
    return a;
}

}  // namespace drsplat
