#include "drsplat/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace drsplat {

int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1)
        hw = 1;
    if (const char* env = std::getenv("DRSPLAT_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1)
            hw = std::min(hw, cap);
    }
    return hw;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn, int threads) {
    if (end <= begin)
        return;
    if (threads <= 0)
        threads = max_threads();
    const std::size_t n = end - begin;
    const std::size_t workers = std::min<std::size_t>(threads, n);
    if (workers <= 1) {
        fn(begin, end);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool)
        t.join();
}

}  // namespace drsplat
