#pragma once

#include "drsplat/eval.hpp"
#include "drsplat/pq.hpp"
#include "drsplat/registration.hpp"
#include "drsplat/types.hpp"

#include <string>
#include <vector>

namespace drsplat {

// All formats are little-endian with a 4-byte magic and a u32 version.
//   DRSG  scene          DRSF  embedding sidecar (full f32 or PQ codes)
//   DRMD  mask dataset   DRPQ  codebook          DRPC  labeled points

void write_scene(const std::string& path, const Scene& scene);
Scene read_scene(const std::string& path);

struct FeatureFile {
    uint32_t dim = 0;  // D
    MatrixRMf full;    // mode 0: N x D
    std::vector<PQCode> codes;  // mode 1
    bool is_pq() const { return !codes.empty(); }
    std::size_t count() const {
        return is_pq() ? codes.size() : static_cast<std::size_t>(full.rows());
    }
};

void write_features_full(const std::string& path, const MatrixRMf& features);
void write_features_pq(const std::string& path, const std::vector<PQCode>& codes,
                       uint32_t dim);
/// PQ-coded files need the companion codebook to recover L.
FeatureFile read_features(const std::string& path, const PQCodebook* cb = nullptr);

void write_mask_dataset(const std::string& path, const MaskDataset& ds);
MaskDataset read_mask_dataset(const std::string& path);

void write_codebook(const std::string& path, const PQCodebook& cb);
PQCodebook read_codebook(const std::string& path);

void write_point_cloud(const std::string& path, const LabeledPointCloud& pc);
LabeledPointCloud read_point_cloud(const std::string& path);

}  // namespace drsplat
