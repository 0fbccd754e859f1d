#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace heavenly {

/// Worker budget: HEAVENLY_STAR_THREADS when set (>= 1), otherwise the
/// hardware concurrency.
inline int thread_budget() {
    if (const char* env = std::getenv("HEAVENLY_STAR_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Deterministic index-space parallel loop (block partition, no shared
/// mutable state beyond what fn touches per index).
template <class Fn>
void parallel_for(int n, Fn&& fn) {
    int workers = std::min(thread_budget(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += workers) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace heavenly
