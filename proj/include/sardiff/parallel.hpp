#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sardiff {

inline unsigned worker_count() {
    if (const char* env = std::getenv("SARDIFF_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n) split into contiguous chunks, one per worker.
// Each index is computed exactly once and results land wherever fn writes
// them, so the partitioning never affects output values. Used at coarse
// granularity (per sample / per chain), not inside inner loops.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace sardiff
