#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace phlab {

// Runs fn(i) for i in [0, n). Items are independent and results must be
// written per-index by the caller, so the outcome does not depend on the
// worker count or schedule.
template <class F>
void parallel_for(int n, int workers, F&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto run = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int count = std::min(workers, n);
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
}

}  // namespace phlab
