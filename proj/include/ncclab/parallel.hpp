#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace ncclab {

/// Parallel map over an index range. Each index writes to its own result
/// slot, so the outcome is identical for every thread count (including 1).
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn&& fn) {
    if (n == 0) return;
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline int default_thread_count() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace ncclab
