#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace multifuse::detail {

/// Worker budget: the MULTIFUSE_THREADS environment variable caps it,
/// hardware concurrency is the default.
inline int thread_budget() {
    if (const char* env = std::getenv("MULTIFUSE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [begin, end), split into contiguous chunks across
/// worker threads. Each index must write only to locations owned by that
/// index, which keeps results independent of the schedule. The first
/// exception thrown by any worker is rethrown after the join.
template <typename Fn>
void parallel_for(int begin, int end, Fn&& fn) {
    const int count = end - begin;
    if (count <= 0) return;
    const int workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr error;
    std::mutex error_mutex;
    const int chunk = (count + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const int lo = begin + t * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, &error, &error_mutex, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace multifuse::detail
