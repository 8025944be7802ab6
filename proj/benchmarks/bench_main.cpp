// Microbenchmarks for the scoring hot paths: exact cosine over raw
// vectors vs LUT-based ADC over PQ codes, plus LUT construction itself.

#include "drsplat/pq.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace drsplat;

namespace {

struct Fixture {
    MatrixRMf db;
    std::vector<PQCode> codes;
    PQCodebook cb;
    Eigen::VectorXf query;

    Fixture(int n, int dim, uint32_t l, uint32_t k) {
        std::mt19937_64 rng(7);
        std::normal_distribution<float> nd(0.f, 1.f);
        cb.dim = static_cast<uint32_t>(dim);
        cb.subvectors = l;
        cb.centroids = k;
        const uint32_t sd = cb.sub_dim();
        for (uint32_t b = 0; b < l; ++b) {
            MatrixRMf block(k, sd);
            for (uint32_t i = 0; i < k; ++i)
                for (uint32_t j = 0; j < sd; ++j)
                    block(i, j) = nd(rng);
            cb.codewords.push_back(block);
        }
        std::uniform_int_distribution<int> pick(0, static_cast<int>(k) - 1);
        db.resize(n, dim);
        for (int i = 0; i < n; ++i) {
            PQCode c(l);
            for (auto& x : c)
                x = static_cast<uint8_t>(pick(rng));
            codes.push_back(c);
            db.row(i) = decode(c, cb).transpose();
        }
        query.resize(dim);
        for (int j = 0; j < dim; ++j)
            query(j) = nd(rng);
        query.normalize();
    }
};

void bm_full_cosine(benchmark::State& state) {
    const Fixture fx(static_cast<int>(state.range(0)), 512, 128, 256);
    for (auto _ : state) {
        double acc = 0.0;
        for (int i = 0; i < fx.db.rows(); ++i) {
            const float dot = fx.db.row(i).dot(fx.query.transpose());
            acc += dot / fx.db.row(i).norm();
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * fx.db.rows());
}

void bm_adc(benchmark::State& state) {
    const Fixture fx(static_cast<int>(state.range(0)), 512, 128, 256);
    const QueryLUT lut = build_query_lut(fx.query, fx.cb);
    for (auto _ : state) {
        double acc = 0.0;
        for (const PQCode& c : fx.codes)
            acc += adc_score(c, lut, AdcNorm::kEuclidean);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(fx.codes.size()));
}

void bm_build_lut(benchmark::State& state) {
    const Fixture fx(16, 512, static_cast<uint32_t>(state.range(0)), 256);
    for (auto _ : state) {
        const QueryLUT lut = build_query_lut(fx.query, fx.cb);
        benchmark::DoNotOptimize(lut.table.data());
    }
}

BENCHMARK(bm_full_cosine)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_adc)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_build_lut)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
