#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace elastic_reflect::detail {

/// Runs body(i) for i in [0, n) across n_threads workers in contiguous
/// chunks. Bodies must write only to their own slots; results are then
/// independent of the worker count. The first exception is rethrown.
template <typename F>
void parallel_for(std::uint64_t n, unsigned n_threads, F&& body) {
    if (n == 0) return;
    if (n_threads <= 1 || n == 1) {
        for (std::uint64_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(n_threads, n));
    const std::uint64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
            const std::uint64_t end = std::min(n, begin + chunk);
            try {
                for (std::uint64_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace elastic_reflect::detail
