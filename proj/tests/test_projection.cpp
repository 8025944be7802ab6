#include "drsplat/projection.hpp"

#include <doctest.h>

#include <random>

using namespace drsplat;

namespace {

Eigen::Vector4d random_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
    return q / q.norm();
}

Camera identity_camera(double f = 100.0, uint32_t w = 640, uint32_t h = 480) {
    Camera cam;
    cam.fx = cam.fy = f;
    cam.cx = w / 2.0;
    cam.cy = h / 2.0;
    cam.width = w;
    cam.height = h;
    return cam;
}

Camera random_camera(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Camera cam = identity_camera(80.0 + 60.0 * u(rng));
    const Mat3 rot = quaternion_to_rotation(random_quat(rng));
    cam.world_to_camera.topLeftCorner<3, 3>() = rot;
    cam.world_to_camera.topRightCorner<3, 1>() = Vec3(u(rng), u(rng), u(rng));
    return cam;
}

}  // namespace

TEST_SUITE_BEGIN("projection");

TEST_CASE("build_covariance diagonal cases") {
    const Eigen::Vector4d ident(1, 0, 0, 0);
    CHECK((build_covariance(Vec3(1, 1, 1), ident) - Mat3::Identity()).norm() == 0.0);
    const Mat3 c = build_covariance(Vec3(2, 1, 1), ident);
    CHECK((c - Vec3(4, 1, 1).asDiagonal().toDenseMatrix()).norm() == 0.0);
}

TEST_CASE("build_covariance 90 degrees about z swaps x/y variances") {
    const double s = std::sqrt(0.5);
    const Eigen::Vector4d q(s, 0, 0, s);
    const Mat3 c = build_covariance(Vec3(1, 2, 3), q);
    const Mat3 expected = Vec3(4, 1, 9).asDiagonal();
    CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_covariance rejects non-positive scale") {
    CHECK_THROWS_AS(build_covariance(Vec3(1, -1, 1), {1, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(build_covariance(Vec3(0, 1, 1), {1, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("build_covariance matches quaternion-matrix oracle on 1000 random inputs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> us(0.05, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 scale(us(rng), us(rng), us(rng));
        const Eigen::Vector4d q = random_quat(rng);
        // independent route through Eigen's quaternion class
        const Mat3 r = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
        const Mat3 expected = r * scale.asDiagonal() * scale.asDiagonal() * r.transpose();
        CHECK((build_covariance(scale, q) - expected).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("on-axis projection is closed form") {
    const double f = 100.0, s = 0.1;
    const Camera cam = identity_camera(f);
    Gaussian3D g;
    g.center = Vec3(0, 0, 1);
    g.scale = Vec3(s, s, s);
    const auto p = project_gaussian(g, cam);
    REQUIRE(p.has_value());
    CHECK(p->mean2d.x() == doctest::Approx(cam.cx));
    CHECK(p->mean2d.y() == doctest::Approx(cam.cy));
    const double var = f * f * s * s + 0.3;
    CHECK(p->cov2d(0, 0) == doctest::Approx(var));
    CHECK(p->cov2d(1, 1) == doctest::Approx(var));
    CHECK(p->cov2d(0, 1) == doctest::Approx(0.0));
    // isotropy on the optical axis
    CHECK(std::abs(p->cov2d(0, 0) - p->cov2d(1, 1)) < 1e-12);
}

TEST_CASE("behind-camera Gaussians are culled") {
    Gaussian3D g;
    g.center = Vec3(0, 0, -1);
    CHECK_FALSE(project_gaussian(g, identity_camera()).has_value());
}

TEST_CASE("projected covariance matches finite-difference Jacobian oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    std::uniform_real_distribution<double> us(0.02, 0.2);
    int tested = 0;
    while (tested < 200) {
        const Camera cam = random_camera(rng);
        Gaussian3D g;
        g.center = Vec3(u(rng), u(rng), u(rng));
        g.scale = Vec3(us(rng), us(rng), us(rng));
        g.rotation = random_quat(rng);
        const auto p = project_gaussian(g, cam);
        if (!p || p->depth < 0.5)
            continue;
        ++tested;

        // numeric Jacobian of world point -> pixel around the center
        const double eps = 1e-6;
        Eigen::Matrix<double, 2, 3> jn;
        auto pix = [&](const Vec3& world) {
            const Vec3 t = cam.rotation() * world + cam.translation();
            return Vec2(cam.fx * t.x() / t.z() + cam.cx, cam.fy * t.y() / t.z() + cam.cy);
        };
        for (int a = 0; a < 3; ++a) {
            Vec3 hi = g.center, lo = g.center;
            hi[a] += eps;
            lo[a] -= eps;
            jn.col(a) = (pix(hi) - pix(lo)) / (2 * eps);
        }
        const Mat3 cov3d = build_covariance(g.scale, g.rotation);
        Mat2 expected = jn * cov3d * jn.transpose();
        expected(0, 0) += 0.3;
        expected(1, 1) += 0.3;
        const double rel =
            (p->cov2d - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
        CHECK(rel < 1e-3);
    }
}

TEST_CASE("effective_alpha center, falloff and clamp") {
    Projected2D p;
    p.mean2d = Vec2(10, 10);
    p.cov2d = Mat2::Identity();

    CHECK(effective_alpha(p, 0.8, Vec2(10, 10)) == doctest::Approx(0.8));
    CHECK(effective_alpha(p, 0.5, Vec2(11, 11)) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(effective_alpha(p, 1.0, Vec2(10, 10)) == doctest::Approx(0.99));
}

TEST_CASE("effective_alpha cutoffs") {
    Projected2D p;
    p.cov2d = Mat2::Identity();
    // beyond 3 sigma
    CHECK(effective_alpha(p, 1.0, Vec2(4, 0)) == 0.0);
    // below 1/255
    CHECK(effective_alpha(p, 0.001, Vec2(0, 0)) == 0.0);
}

TEST_CASE("effective_alpha rejects singular covariance") {
    Projected2D p;
    p.cov2d = Mat2::Zero();
    CHECK_THROWS(effective_alpha(p, 0.5, Vec2(0, 0)));
}

TEST_SUITE_END();
