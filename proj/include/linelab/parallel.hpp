#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace linelab {

/// Runs fn(i) for i in [0, n) on up to `threads` workers in contiguous
/// chunks. Callers write to disjoint indices, so results are deterministic
/// regardless of the thread count.
inline void parallel_for(int n, int threads,
                         const std::function<void(int)> &fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2 * threads) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i)
                fn(i);
        });
    }
    for (auto &th : pool)
        th.join();
}

} // namespace linelab
