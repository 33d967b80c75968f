#pragma once

// Deterministic index-space parallelism: results must be written to
// caller-owned slots by index, so execution order never affects output.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace chronoreach {

// Runs body(i) for i in [0, count) on up to `jobs` threads (jobs <= 1: inline).
// The first exception thrown by any worker is rethrown after all join.
template <typename Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
    if (count == 0) return;
    if (jobs <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace chronoreach
