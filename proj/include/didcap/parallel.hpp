#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace didcap {

/// Worker cap: DIDCAP_THREADS if set to a positive integer, else hardware
/// parallelism (at least 1).
[[nodiscard]] inline unsigned worker_count()
{
    if (const char* env = std::getenv("DIDCAP_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Run body(i) for i in [0, count) on up to `workers` threads.
///
/// Results must be written to per-index slots by the caller so that output
/// order never depends on scheduling. The first exception thrown by any task
/// is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t count, Body&& body, unsigned workers = worker_count())
{
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, workers), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace didcap
