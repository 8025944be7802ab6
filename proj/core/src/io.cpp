#include "drsplat/io.hpp"

#include <cstring>
#include <fstream>

namespace drsplat {

namespace {

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_)
            throw std::runtime_error("cannot open for writing: " + path);
    }
    void magic(const char m[4]) { out_.write(m, 4); }
    template <typename T>
    void put(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_f32(double v) { put(static_cast<float>(v)); }
    void raw(const void* p, std::size_t bytes) {
        out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(bytes));
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_)
            throw std::runtime_error("cannot open: " + path);
    }
    void expect_magic(const char m[4]) {
        char buf[4];
        in_.read(buf, 4);
        if (!in_ || std::memcmp(buf, m, 4) != 0)
            throw std::runtime_error("bad magic in " + path_);
    }
    template <typename T>
    T get() {
        T v;
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in_)
            throw std::runtime_error("truncated file: " + path_);
        return v;
    }
    void raw(void* p, std::size_t bytes) {
        in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(bytes));
        if (!in_)
            throw std::runtime_error("truncated file: " + path_);
    }

private:
    std::ifstream in_;
    std::string path_;
};

constexpr uint32_t kVersion = 1;

void put_camera(Writer& w, const Camera& cam) {
    w.put_f32(cam.fx);
    w.put_f32(cam.fy);
    w.put_f32(cam.cx);
    w.put_f32(cam.cy);
    w.put<uint32_t>(cam.width);
    w.put<uint32_t>(cam.height);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            w.put_f32(cam.world_to_camera(r, c));
}

Camera get_camera(Reader& r) {
    Camera cam;
    cam.fx = r.get<float>();
    cam.fy = r.get<float>();
    cam.cx = r.get<float>();
    cam.cy = r.get<float>();
    cam.width = r.get<uint32_t>();
    cam.height = r.get<uint32_t>();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            cam.world_to_camera(i, j) = r.get<float>();
    return cam;
}

}  // namespace

void write_scene(const std::string& path, const Scene& scene) {
    Writer w(path);
    w.magic("DRSG");
    w.put<uint32_t>(kVersion);
    w.put<uint32_t>(static_cast<uint32_t>(scene.size()));
    for (const Gaussian3D& g : scene.gaussians) {
        for (int a = 0; a < 3; ++a) w.put_f32(g.center[a]);
        for (int a = 0; a < 3; ++a) w.put_f32(g.scale[a]);
        for (int a = 0; a < 4; ++a) w.put_f32(g.rotation[a]);
        w.put_f32(g.opacity);
        for (int a = 0; a < 3; ++a) w.put_f32(g.color[a]);
        w.put<int32_t>(g.label);
    }
}

Scene read_scene(const std::string& path) {
    Reader r(path);
    r.expect_magic("DRSG");
    if (r.get<uint32_t>() != kVersion)
        throw std::runtime_error("unsupported DRSG version: " + path);
    const uint32_t n = r.get<uint32_t>();
    Scene scene;
    scene.gaussians.resize(n);
    for (Gaussian3D& g : scene.gaussians) {
        for (int a = 0; a < 3; ++a) g.center[a] = r.get<float>();
        for (int a = 0; a < 3; ++a) g.scale[a] = r.get<float>();
        for (int a = 0; a < 4; ++a) g.rotation[a] = r.get<float>();
        g.opacity = r.get<float>();
        for (int a = 0; a < 3; ++a) g.color[a] = r.get<float>();
        g.label = r.get<int32_t>();
    }
    return scene;
}

void write_features_full(const std::string& path, const MatrixRMf& features) {
    Writer w(path);
    w.magic("DRSF");
    w.put<uint32_t>(kVersion);
    w.put<uint32_t>(static_cast<uint32_t>(features.rows()));
    w.put<uint32_t>(static_cast<uint32_t>(features.cols()));
    w.put<uint8_t>(0);
    w.raw(features.data(), sizeof(float) * static_cast<std::size_t>(features.size()));
}

void write_features_pq(const std::string& path, const std::vector<PQCode>& codes,
                       uint32_t dim) {
    Writer w(path);
    w.magic("DRSF");
    w.put<uint32_t>(kVersion);
    w.put<uint32_t>(static_cast<uint32_t>(codes.size()));
    w.put<uint32_t>(dim);
    w.put<uint8_t>(1);
    for (const PQCode& c : codes)
        w.raw(c.data(), c.size());
}

FeatureFile read_features(const std::string& path, const PQCodebook* cb) {
    Reader r(path);
    r.expect_magic("DRSF");
    if (r.get<uint32_t>() != kVersion)
        throw std::runtime_error("unsupported DRSF version: " + path);
    const uint32_t n = r.get<uint32_t>();
    const uint32_t d = r.get<uint32_t>();
    const uint8_t mode = r.get<uint8_t>();
    FeatureFile f;
    f.dim = d;
    if (mode == 0) {
        f.full = MatrixRMf(n, d);
        r.raw(f.full.data(), sizeof(float) * static_cast<std::size_t>(n) * d);
    } else if (mode == 1) {
        if (!cb)
            throw std::invalid_argument("read_features: PQ file needs a codebook for L");
        f.codes.assign(n, PQCode(cb->subvectors));
        for (PQCode& c : f.codes)
            r.raw(c.data(), c.size());
    } else {
        throw std::runtime_error("unknown DRSF mode in " + path);
    }
    return f;
}

void write_mask_dataset(const std::string& path, const MaskDataset& ds) {
    Writer w(path);
    w.magic("DRMD");
    w.put<uint32_t>(kVersion);
    w.put<uint32_t>(static_cast<uint32_t>(ds.views.size()));
    w.put<uint32_t>(ds.mask_count());
    w.put<uint32_t>(ds.dim());
    w.raw(ds.embeddings.data(),
          sizeof(float) * static_cast<std::size_t>(ds.embeddings.size()));
    for (const MaskView& mv : ds.views) {
        put_camera(w, mv.camera);
        w.put<uint32_t>(static_cast<uint32_t>(mv.mask_table.size()));
        for (const auto& [local, global] : mv.mask_table) {
            w.put<uint32_t>(local);
            w.put<uint32_t>(global);
        }
        w.raw(mv.mask_map.data(), sizeof(uint32_t) * mv.mask_map.size());
    }
}

MaskDataset read_mask_dataset(const std::string& path) {
    Reader r(path);
    r.expect_magic("DRMD");
    if (r.get<uint32_t>() != kVersion)
        throw std::runtime_error("unsupported DRMD version: " + path);
    const uint32_t views = r.get<uint32_t>();
    const uint32_t m = r.get<uint32_t>();
    const uint32_t d = r.get<uint32_t>();
    MaskDataset ds;
    ds.embeddings = MatrixRMf(m, d);
    r.raw(ds.embeddings.data(), sizeof(float) * static_cast<std::size_t>(m) * d);
    ds.views.resize(views);
    for (MaskView& mv : ds.views) {
        mv.camera = get_camera(r);
        const uint32_t local_count = r.get<uint32_t>();
        for (uint32_t i = 0; i < local_count; ++i) {
            const uint32_t local = r.get<uint32_t>();
            const uint32_t global = r.get<uint32_t>();
            mv.mask_table[local] = global;
        }
        mv.mask_map.resize(static_cast<std::size_t>(mv.camera.width) * mv.camera.height);
        r.raw(mv.mask_map.data(), sizeof(uint32_t) * mv.mask_map.size());
    }
    return ds;
}

void write_codebook(const std::string& path, const PQCodebook& cb) {
    Writer w(path);
    w.magic("DRPQ");
    w.put<uint32_t>(kVersion);
    w.put<uint32_t>(cb.dim);
    w.put<uint32_t>(cb.subvectors);
    w.put<uint32_t>(cb.centroids);
    w.put<uint64_t>(cb.seed);
    for (const MatrixRMf& block : cb.codewords)
        w.raw(block.data(), sizeof(float) * static_cast<std::size_t>(block.size()));
}

PQCodebook read_codebook(const std::string& path) {
    Reader r(path);
    r.expect_magic("DRPQ");
    if (r.get<uint32_t>() != kVersion)
        throw std::runtime_error("unsupported DRPQ version: " + path);
    PQCodebook cb;
    cb.dim = r.get<uint32_t>();
    cb.subvectors = r.get<uint32_t>();
    cb.centroids = r.get<uint32_t>();
    cb.seed = r.get<uint64_t>();
    if (cb.subvectors == 0 || cb.dim % cb.subvectors != 0)
        throw std::runtime_error("corrupt DRPQ header: " + path);
    cb.codewords.assign(cb.subvectors, MatrixRMf(cb.centroids, cb.sub_dim()));
    for (MatrixRMf& block : cb.codewords)
        r.raw(block.data(), sizeof(float) * static_cast<std::size_t>(block.size()));
    return cb;
}

void write_point_cloud(const std::string& path, const LabeledPointCloud& pc) {
    Writer w(path);
    w.magic("DRPC");
    w.put<uint32_t>(kVersion);
    w.put<uint32_t>(static_cast<uint32_t>(pc.size()));
    w.put<uint32_t>(static_cast<uint32_t>(pc.label_count));
    for (std::size_t i = 0; i < pc.size(); ++i) {
        for (int a = 0; a < 3; ++a) w.put_f32(pc.points[i][a]);
        w.put<int32_t>(pc.labels[i]);
    }
}

LabeledPointCloud read_point_cloud(const std::string& path) {
    Reader r(path);
    r.expect_magic("DRPC");
    if (r.get<uint32_t>() != kVersion)
        throw std::runtime_error("unsupported DRPC version: " + path);
    const uint32_t q = r.get<uint32_t>();
    LabeledPointCloud pc;
    pc.label_count = static_cast<int>(r.get<uint32_t>());
    pc.points.resize(q);
    pc.labels.resize(q);
    for (uint32_t i = 0; i < q; ++i) {
        for (int a = 0; a < 3; ++a) pc.points[i][a] = r.get<float>();
        pc.labels[i] = r.get<int32_t>();
    }
    return pc;
}

}  // namespace drsplat
