#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace synthrm {

// Static block partition of [begin, end); deterministic work assignment,
// results must not depend on which thread ran which block.
inline void parallel_for(int begin, int end, const std::function<void(int)>& body,
                         int num_threads = 0) {
    const int n = end - begin;
    if (n <= 0) return;
    int hw = num_threads > 0 ? num_threads : (int)std::thread::hardware_concurrency();
    hw = std::clamp(hw, 1, n);
    if (hw == 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<int> next{begin};
    std::vector<std::thread> pool;
    pool.reserve(hw);
    for (int t = 0; t < hw; ++t)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= end) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

} // namespace synthrm
