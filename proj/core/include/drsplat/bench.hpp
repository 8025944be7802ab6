#pragma once

#include "drsplat/pq.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace drsplat {

struct BenchReport {
    std::string operation;
    std::size_t n = 0;
    uint32_t dim = 0, subvectors = 0;
    int repetitions = 0;
    double median_ms = 0.0, p95_ms = 0.0;
    double throughput_per_s = 0.0;  // scored vectors per second
};

struct BenchLutResult {
    BenchReport full;  // exact cosine over the raw vectors
    BenchReport adc;   // LUT-based scoring over PQ codes
    double speedup = 0.0;  // full median / adc median
    int top1_full = -1, top1_adc = -1;
};

/// Times scoring n random database vectors against one query, full
/// precision vs ADC, over `repetitions` passes each.
BenchLutResult bench_lut(std::size_t n, uint32_t dim, uint32_t subvectors,
                         int repetitions, uint64_t seed = 0);

}  // namespace drsplat
