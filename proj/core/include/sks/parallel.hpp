#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace sks {

/// Runs f(i) for i in [0, count) on a small thread pool and returns results
/// ordered by index. Each task must be independent (own RNG stream, own
/// solver); the ordered collection keeps reductions deterministic.
template <typename R>
std::vector<R> parallel_map(int count, const std::function<R(int)>& f,
                            unsigned max_threads = 0) {
    std::vector<R> out(count);
    unsigned hw = max_threads ? max_threads : std::thread::hardware_concurrency();
    unsigned workers = std::min<unsigned>(std::max(1u, hw), count > 0 ? count : 1);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) out[i] = f(i);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace sks
