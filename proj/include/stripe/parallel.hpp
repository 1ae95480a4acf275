#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stripe {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is handled by
/// exactly one call, so writing into a pre-sized output slot per index keeps results
/// independent of the worker count. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned jobs, Body&& body) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr first;
    std::mutex mu;
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += jobs) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lk(mu);
                        if (!first) first = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace stripe
