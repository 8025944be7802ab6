#pragma once

#include "drsplat/types.hpp"

#include <cstdint>
#include <vector>

namespace drsplat {

/// Product-quantization codebook: L sub-spaces, K centroids each, over
/// D-dimensional vectors.
struct PQCodebook {
    uint32_t dim = 0;         // D
    uint32_t subvectors = 0;  // L
    uint32_t centroids = 0;   // K, <= 256 for u8 codes
    uint64_t seed = 0;
    // subvectors blocks of K x (D/L), row-major per block
    std::vector<MatrixRMf> codewords;

    uint32_t sub_dim() const { return dim / subvectors; }
    const MatrixRMf& block(uint32_t l) const { return codewords[l]; }
};

using PQCode = std::vector<uint8_t>;  // length L, each < K

struct QueryLUT {
    // table[l][j] = q_l . c_lj ; norm_table[l][j] = ||c_lj||_2
    MatrixRMf table;       // L x K
    MatrixRMf norm_table;  // L x K
};

enum class AdcNorm {
    kSumOfSubNorms,   // divide by sum_l ||f_l|| (default)
    kEuclidean,       // divide by sqrt(sum_l ||f_l||^2), exact cosine
};

/// Seeded k-means (k-means++ init, max 25 iterations or relative inertia
/// change < 1e-4, empty clusters reseeded from the farthest point) run
/// independently per sub-space. Deterministic given the seed; sub-spaces
/// may train in parallel without affecting the result.
PQCodebook train_codebook(const MatrixRMf& database, uint32_t subvectors,
                          uint32_t centroids, uint64_t seed, int threads = 0);

/// Plain k-means on full vectors; also the L=1 training path.
/// Returns centroids (k x D) and final inertia.
struct KMeansResult {
    MatrixRMf centroids;
    double inertia = 0.0;
    int iterations = 0;
};
KMeansResult kmeans(const MatrixRMf& data, uint32_t k, uint64_t seed,
                    int max_iterations = 25, double tol = 1e-4);

PQCode encode(const Eigen::VectorXf& v, const PQCodebook& cb);
Eigen::VectorXf decode(const PQCode& code, const PQCodebook& cb);

QueryLUT build_query_lut(const Eigen::VectorXf& q, const PQCodebook& cb);

/// raw / denom with raw = sum_l table[l][code_l], denom = sum_l
/// norm_table[l][code_l] (sum-of-sub-norms cosine approximation).
/// kEuclidean mode divides by the root of summed squared sub-norms
/// instead, giving the exact cosine against decode(code).
double adc_score(const PQCode& code, const QueryLUT& lut,
                 AdcNorm norm = AdcNorm::kSumOfSubNorms);

/// Symmetric per-sub-space centroid-pair distance tables,
/// LUT_l[i][j] = ||c_li - c_lj||^2, for code-vs-code distance checks.
std::vector<MatrixRMf> build_symmetric_lut(const PQCodebook& cb);

/// Code-vs-code squared distance via the symmetric tables.
double symmetric_distance(const PQCode& a, const PQCode& b,
                          const std::vector<MatrixRMf>& lut);

}  // namespace drsplat
