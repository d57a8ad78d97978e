#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace optmht {

// Calls body(i) for i in [0, count) on up to `threads` workers. Index i is
// always handled by worker i % workers, so callers that store per-index
// results and reduce them in index order get identical output for any
// worker count. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
    const int workers = std::clamp(threads, 1, std::max(count, 1));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace optmht
