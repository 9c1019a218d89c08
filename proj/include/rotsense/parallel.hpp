#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace rotsense {

/// Thread count for parallel work; 0 selects the hardware concurrency.
struct Execution {
    unsigned threads = 0;

    unsigned resolved() const {
        if (threads > 0) return threads;
        return std::max(1u, std::thread::hardware_concurrency());
    }
};

/// Runs body(i) once for every i in [0, n) on up to exec.resolved() threads.
/// Work items are handed out dynamically; results must be written to slots indexed
/// by i so that the outcome does not depend on scheduling. The first exception in
/// index order is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, Execution exec, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(exec.resolved(), n);
    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace rotsense
