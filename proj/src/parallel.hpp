#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cvqe::detail {

/// Runs body(0..count-1) on up to `workers` threads. The first exception is
/// rethrown after all threads finish.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& body) {
    const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
    if (n_threads == 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, count); ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}


}  // namespace cvqe::detail
