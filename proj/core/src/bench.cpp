#include "drsplat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace drsplat {

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const std::size_t idx = std::min(v.size() - 1,
        static_cast<std::size_t>(std::ceil(q * v.size())) - 1);
    return v[idx];
}

BenchReport make_report(const std::string& op, std::size_t n, uint32_t dim,
                        uint32_t subvectors, const std::vector<double>& times_ms) {
    BenchReport r;
    r.operation = op;
    r.n = n;
    r.dim = dim;
    r.subvectors = subvectors;
    r.repetitions = static_cast<int>(times_ms.size());
    r.median_ms = quantile(times_ms, 0.5);
    r.p95_ms = quantile(times_ms, 0.95);
    r.throughput_per_s = r.median_ms > 0.0 ? n / (r.median_ms / 1000.0) : 0.0;
    return r;
}

}  // namespace

BenchLutResult bench_lut(std::size_t n, uint32_t dim, uint32_t subvectors,
                         int repetitions, uint64_t seed) {
    if (repetitions < 1)
        throw std::invalid_argument("bench_lut: repetitions must be >= 1");
    if (subvectors == 0 || dim % subvectors != 0)
        throw std::invalid_argument("bench_lut: D must be divisible by L");

    constexpr uint32_t kCentroids = 256;
    const uint32_t sd = dim / subvectors;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> coef(-1.0f, 1.0f);

    PQCodebook cb;
    cb.dim = dim;
    cb.subvectors = subvectors;
    cb.centroids = kCentroids;
    cb.seed = seed;
    cb.codewords.assign(subvectors, MatrixRMf(kCentroids, sd));
    for (auto& block : cb.codewords)
        for (Eigen::Index i = 0; i < block.size(); ++i)
            block.data()[i] = coef(rng);

    // Database vectors are exact centroid concatenations, so the codes
    // are known by construction and full vs ADC top-1 must agree.
    std::vector<uint8_t> codes(n * subvectors);
    for (auto& c : codes)
        c = static_cast<uint8_t>(rng() & 0xff);
    std::vector<float> db(n * dim);
    for (std::size_t i = 0; i < n; ++i)
        for (uint32_t l = 0; l < subvectors; ++l) {
            const uint8_t c = codes[i * subvectors + l];
            std::copy_n(cb.codewords[l].row(c).data(), sd, &db[i * dim + l * sd]);
        }
    std::vector<float> inv_norm(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (uint32_t k = 0; k < dim; ++k)
            s += static_cast<double>(db[i * dim + k]) * db[i * dim + k];
        inv_norm[i] = s > 0.0 ? static_cast<float>(1.0 / std::sqrt(s)) : 0.0f;
    }

    Eigen::VectorXf q(dim);
    for (uint32_t k = 0; k < dim; ++k)
        q[k] = coef(rng);
    q.normalize();

    BenchLutResult out;
    using clock = std::chrono::steady_clock;

    std::vector<double> full_ms;
    for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = clock::now();
        float best = -1e30f;
        std::size_t best_i = 0;
        const float* row = db.data();
        for (std::size_t i = 0; i < n; ++i, row += dim) {
            float dot = 0.0f;
            for (uint32_t k = 0; k < dim; ++k)
                dot += q[k] * row[k];
            const float score = dot * inv_norm[i];
            if (score > best) {
                best = score;
                best_i = i;
            }
        }
        full_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
        out.top1_full = static_cast<int>(best_i);
    }

    // Interleaved (dot, squared-norm) table: one cache line serves both
    // sums for a sub-space entry.
    const QueryLUT lut = build_query_lut(q, cb);
    std::vector<float> table(static_cast<std::size_t>(subvectors) * kCentroids * 2);
    for (uint32_t l = 0; l < subvectors; ++l)
        for (uint32_t j = 0; j < kCentroids; ++j) {
            table[(static_cast<std::size_t>(l) * kCentroids + j) * 2] = lut.table(l, j);
            const float nrm = lut.norm_table(l, j);
            table[(static_cast<std::size_t>(l) * kCentroids + j) * 2 + 1] = nrm * nrm;
        }

    std::vector<double> adc_ms;
    for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = clock::now();
        float best = -1e30f;
        std::size_t best_i = 0;
        const uint8_t* code = codes.data();
        for (std::size_t i = 0; i < n; ++i, code += subvectors) {
            float dot = 0.0f, nsq = 0.0f;
            const float* t = table.data();
            for (uint32_t l = 0; l < subvectors; ++l, t += kCentroids * 2) {
                const float* e = t + 2u * code[l];
                dot += e[0];
                nsq += e[1];
            }
            const float score = dot / std::sqrt(nsq);
            if (score > best) {
                best = score;
                best_i = i;
            }
        }
        adc_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
        out.top1_adc = static_cast<int>(best_i);
    }

    out.full = make_report("full_cosine", n, dim, subvectors, full_ms);
    out.adc = make_report("adc_lut", n, dim, subvectors, adc_ms);
    out.speedup = out.adc.median_ms > 0.0 ? out.full.median_ms / out.adc.median_ms : 0.0;
    return out;
}

}  // namespace drsplat
