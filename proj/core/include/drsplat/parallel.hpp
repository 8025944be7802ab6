#pragma once

#include <cstddef>
#include <functional>

namespace drsplat {

/// Worker cap: min(DRSPLAT_THREADS, hardware_concurrency), at least 1.
int max_threads();

/// Runs fn(begin..end) split into contiguous chunks, one per worker.
/// With threads == 1 everything runs inline on the calling thread.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  int threads = 0);

}  // namespace drsplat
