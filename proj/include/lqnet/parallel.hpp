#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace lqnet {

/// Calls fn(i) for i in [0, count) on up to `workers` threads (0: hardware
/// concurrency). The first exception thrown by any call is rethrown.
template <class Fn>
void parallel_for(int count, Fn&& fn, unsigned workers = 0) {
    if (count <= 0) return;
    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(count));

    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (int i = next++; i < count; i = next++) fn(i);
        } catch (...) {
            errors[w] = std::current_exception();
            next = count;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace lqnet
