#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cogarq {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency), with
/// a fixed strided assignment of indices to workers. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body)
{
    std::size_t workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t k = 0; k < workers; ++k)
        pool.emplace_back([&, k] {
            try {
                for (std::size_t i = k; i < n; i += workers)
                    body(i);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace cogarq
