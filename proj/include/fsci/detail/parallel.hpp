#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fsci {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const auto workers = std::min<std::size_t>(std::max(1u, threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_at = n;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        // Keep the lowest failing index so the error is schedule-independent.
                        std::lock_guard lock(failure_mutex);
                        if (i < failed_at) {
                            failed_at = i;
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

} // namespace fsci
