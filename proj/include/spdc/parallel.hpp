#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spdc {

// SPDC_THREADS if set to a positive integer, else the hardware concurrency.
inline std::ptrdiff_t worker_count()
{
    if (char const* env = std::getenv("SPDC_THREADS"); env && *env) {
        long const n = std::strtol(env, nullptr, 10);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Static-chunked parallel loop over [0, n). Each index is visited exactly
// once, so results written per index do not depend on scheduling. The first
// exception thrown by any worker is rethrown on the calling thread.
template <typename F>
void parallel_for(std::ptrdiff_t n, F&& body)
{
    if (n <= 0)
        return;
    std::ptrdiff_t workers = worker_count();
    workers = std::min(workers, n);
    if (workers == 1) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (std::ptrdiff_t w = 0; w < workers; ++w) {
            std::ptrdiff_t const begin = n * w / workers;
            std::ptrdiff_t const end = n * (w + 1) / workers;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::ptrdiff_t i = begin; i < end; ++i)
                        body(i);
                } catch (...) {
                    std::scoped_lock lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

}  // namespace spdc
