#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace epimod {

/// Worker count: EPIMOD_THREADS when set, otherwise hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on a bounded pool. Exceptions inside fn must be
/// handled by fn itself (workers treat an escaped exception as fatal).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         std::size_t max_threads) {
    if (n == 0) return;
    const std::size_t threads = std::min(max_threads > 0 ? max_threads : 1, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& worker : pool) worker.join();
}

} // namespace epimod
