#include "drsplat/io.hpp"
#include "drsplat/synth.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace drsplat;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("drsplat_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

SceneSpec tiny_spec(uint64_t seed) {
    SceneSpec spec;
    spec.seed = seed;
    spec.gaussian_count = 40;
    spec.label_count = 3;
    spec.dim = 32;
    spec.rig.views = 3;
    spec.rig.width = spec.rig.height = 24;
    return spec;
}

bool same_scene(const Scene& a, const Scene& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& x = a.gaussians[i];
        const auto& y = b.gaussians[i];
        // round-trip through f32, so compare at float precision
        if ((x.center.cast<float>() - y.center.cast<float>()).norm() != 0.f ||
            (x.scale.cast<float>() - y.scale.cast<float>()).norm() != 0.f ||
            (x.rotation.cast<float>() - y.rotation.cast<float>()).norm() != 0.f ||
            static_cast<float>(x.opacity) != static_cast<float>(y.opacity) ||
            x.label != y.label)
            return false;
    }
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("io_synth");

TEST_CASE("scene files round-trip at float precision") {
    TempDir tmp;
    const auto gen = gen_scene(tiny_spec(5));
    const auto p = tmp.file("scene.drsg");
    write_scene(p, gen.scene);
    const Scene back = read_scene(p);
    CHECK(same_scene(gen.scene, back));
    // a second write of the reread scene is byte-identical
    const auto p2 = tmp.file("scene2.drsg");
    write_scene(p2, back);
    std::ifstream f1(p, std::ios::binary), f2(p2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), {});
    const std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
}

TEST_CASE("full feature files round-trip exactly") {
    TempDir tmp;
    std::mt19937_64 rng(3);
    std::normal_distribution<float> nd(0.f, 1.f);
    MatrixRMf f(17, 9);
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j)
            f(i, j) = nd(rng);
    const auto p = tmp.file("f.drsf");
    write_features_full(p, f);
    const auto back = read_features(p);
    CHECK_FALSE(back.is_pq());
    CHECK(back.dim == 9);
    REQUIRE(back.full.rows() == 17);
    CHECK((back.full - f).norm() == 0.f);
}

TEST_CASE("pq feature files round-trip and need the codebook") {
    TempDir tmp;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(0, 7);
    std::vector<PQCode> codes;
    for (int i = 0; i < 25; ++i) {
        PQCode c(4);
        for (auto& b : c)
            b = static_cast<uint8_t>(pick(rng));
        codes.push_back(c);
    }
    const auto p = tmp.file("codes.drsf");
    write_features_pq(p, codes, 32);

    PQCodebook cb;
    cb.dim = 32;
    cb.subvectors = 4;
    cb.centroids = 8;
    cb.codewords.assign(4, MatrixRMf::Zero(8, 8));
    const auto back = read_features(p, &cb);
    CHECK(back.is_pq());
    CHECK(back.dim == 32);
    CHECK(back.codes == codes);
    CHECK_THROWS_AS(read_features(p), std::invalid_argument);
}

TEST_CASE("codebook files carry every block and the seed") {
    TempDir tmp;
    std::mt19937_64 rng(9);
    std::normal_distribution<float> nd(0.f, 1.f);
    MatrixRMf data(60, 12);
    for (int i = 0; i < data.rows(); ++i)
        for (int j = 0; j < data.cols(); ++j)
            data(i, j) = nd(rng);
    const auto cb = train_codebook(data, 3, 5, 77, 1);
    const auto p = tmp.file("cb.drpq");
    write_codebook(p, cb);
    const auto back = read_codebook(p);
    CHECK(back.dim == cb.dim);
    CHECK(back.subvectors == cb.subvectors);
    CHECK(back.centroids == cb.centroids);
    CHECK(back.seed == 77);
    REQUIRE(back.codewords.size() == 3);
    for (uint32_t l = 0; l < 3; ++l)
        CHECK((back.block(l) - cb.block(l)).norm() == 0.f);
}

TEST_CASE("mask datasets round-trip with cameras and tables") {
    TempDir tmp;
    const auto spec = tiny_spec(21);
    const auto gen = gen_scene(spec);
    const auto ds = render_masks(gen.scene, gen.label_embeddings, spec.rig, 0.03, 4);
    const auto p = tmp.file("masks.drmd");
    write_mask_dataset(p, ds);
    const auto back = read_mask_dataset(p);
    REQUIRE(back.views.size() == ds.views.size());
    CHECK((back.embeddings - ds.embeddings).norm() == 0.f);
    for (std::size_t v = 0; v < ds.views.size(); ++v) {
        CHECK(back.views[v].mask_map == ds.views[v].mask_map);
        CHECK(back.views[v].mask_table == ds.views[v].mask_table);
        CHECK(back.views[v].camera.width == ds.views[v].camera.width);
        CHECK(static_cast<float>(back.views[v].camera.fx) ==
              static_cast<float>(ds.views[v].camera.fx));
        CHECK((back.views[v].camera.world_to_camera.cast<float>() -
               ds.views[v].camera.world_to_camera.cast<float>()).norm() == 0.f);
    }
}

TEST_CASE("point cloud files round-trip labels") {
    TempDir tmp;
    const auto gen = gen_scene(tiny_spec(31));
    const auto p = tmp.file("pc.drpc");
    write_point_cloud(p, gen.point_cloud);
    const auto back = read_point_cloud(p);
    CHECK(back.label_count == gen.point_cloud.label_count);
    REQUIRE(back.size() == gen.point_cloud.size());
    CHECK(back.labels == gen.point_cloud.labels);
    for (std::size_t i = 0; i < back.size(); ++i)
        CHECK((back.points[i].cast<float>() -
               gen.point_cloud.points[i].cast<float>()).norm() == 0.f);
}

TEST_CASE("bad magic and truncation are rejected") {
    TempDir tmp;
    const auto p = tmp.file("junk.drsg");
    {
        std::ofstream f(p, std::ios::binary);
        f << "NOPE";
    }
    CHECK_THROWS_AS(read_scene(p), std::runtime_error);
    CHECK_THROWS_AS(read_scene(tmp.file("missing.drsg")), std::runtime_error);

    const auto good = tmp.file("good.drsg");
    write_scene(good, gen_scene(tiny_spec(1)).scene);
    const auto trunc = tmp.file("trunc.drsg");
    {
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        std::ofstream out(trunc, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(read_scene(trunc), std::runtime_error);
}

TEST_CASE("generation is deterministic in the seed") {
    const auto a = gen_scene(tiny_spec(99));
    const auto b = gen_scene(tiny_spec(99));
    const auto c = gen_scene(tiny_spec(100));
    CHECK(same_scene(a.scene, b.scene));
    CHECK((a.label_embeddings - b.label_embeddings).norm() == 0.f);
    CHECK(a.point_cloud.labels == b.point_cloud.labels);
    CHECK_FALSE(same_scene(a.scene, c.scene));
}

TEST_CASE("generated scenes satisfy their own contract") {
    const auto spec = tiny_spec(123);
    const auto gen = gen_scene(spec);
    CHECK(gen.scene.size() == spec.gaussian_count);
    CHECK(gen.label_embeddings.rows() == 3);
    CHECK(gen.point_cloud.size() == spec.gaussian_count * spec.points_per_gaussian);
    CHECK(gen.point_cloud.label_count == 3);
    for (const auto& g : gen.scene.gaussians) {
        CHECK(g.label >= 0);
        CHECK(g.label < 3);
        CHECK(g.opacity >= spec.opacity_min);
        CHECK(g.opacity <= spec.opacity_max);
        for (int a = 0; a < 3; ++a) {
            CHECK(g.scale[a] >= spec.scale_min * 0.999);
            CHECK(g.scale[a] <= spec.scale_max * 1.001);
        }
        CHECK(std::abs(g.rotation.norm() - 1.0) < 1e-9);
    }
    // label embeddings are unit and pairwise separated
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(gen.label_embeddings.row(i).norm() - 1.f) < 1e-5f);
        for (int j = i + 1; j < 3; ++j)
            CHECK(gen.label_embeddings.row(i).dot(gen.label_embeddings.row(j)) <= 0.5f + 1e-6f);
    }
}

TEST_CASE("the camera rig looks at the scene center") {
    CameraRig rig;
    rig.views = 6;
    for (uint32_t v = 0; v < rig.views; ++v) {
        const Camera cam = rig.camera(v);
        cam.validate();
        // the look-at point projects to the principal point, in front
        const Eigen::Vector4d h(rig.center.x(), rig.center.y(), rig.center.z(), 1.0);
        const Eigen::Vector4d c = cam.world_to_camera * h;
        CHECK(c.z() > 0.0);
        CHECK(std::abs(cam.fx * c.x() / c.z()) < 1e-9);
        CHECK(std::abs(cam.fy * c.y() / c.z()) < 1e-9);
    }
}

TEST_CASE("noise-free masks agree with top contribution labels") {
    const auto spec = tiny_spec(55);
    const auto gen = gen_scene(spec);
    const auto ds = render_masks(gen.scene, gen.label_embeddings, spec.rig, 0.0, 9);
    REQUIRE(ds.views.size() == spec.rig.views);
    CHECK(ds.embeddings.rows() == spec.rig.views * spec.label_count);

    // with sigma 0 every mask embedding is exactly its label embedding
    for (uint32_t v = 0; v < spec.rig.views; ++v)
        for (uint32_t l = 0; l < spec.label_count; ++l)
            CHECK((ds.embeddings.row(v * spec.label_count + l) -
                   gen.label_embeddings.row(l)).norm() < 1e-6f);

    const auto& view = ds.views[0];
    const ViewCache cache(gen.scene, view.camera);
    int checked = 0;
    for (uint32_t y = 0; y < view.camera.height && checked < 200; ++y) {
        for (uint32_t x = 0; x < view.camera.width && checked < 200; ++x) {
            const auto res = cache.composite(Vec2(x + 0.5, y + 0.5));
            const auto top = topk_select(res.contributions, 1);
            const uint32_t id = view.mask_at(x, y);
            if (top.empty()) {
                CHECK(id == 0);
            } else {
                const int lab = gen.scene.gaussians[top[0].gaussian_index].label;
                CHECK(id == static_cast<uint32_t>(lab + 1));
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_SUITE_END();
