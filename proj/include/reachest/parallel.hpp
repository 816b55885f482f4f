#ifndef REACHEST_PARALLEL_HPP
#define REACHEST_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reachest {

/// Worker count used by parallel_for: hardware concurrency, at least 1.
inline std::size_t worker_count()
{
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/**
 * Splits [0, n) into contiguous chunks, one per worker, and calls
 * body(worker, begin, end) for each. Chunk boundaries depend only on n and the
 * worker count. The first exception thrown by any worker is rethrown.
 */
template <typename Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body)
{
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1)
    {
        body(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        const std::size_t begin = std::min(n, w * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try
            {
                body(w, begin, end);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace reachest

#endif
