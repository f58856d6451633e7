#pragma once
// Deterministic task runner: worker threads pull item indices from a shared
// atomic counter and write results into index-addressed slots. Output is a
// pure function of the item list, never of the worker count or of scheduling
// order; any reduction over the results must be done sequentially by the
// caller in ascending index order.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nqa {

// Applies fn(i) for i in [0, n) using `workers` threads and returns the
// results in index order. If any item throws, the exception thrown by the
// lowest-index failing item is rethrown after all threads have stopped.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, int workers, Fn&& fn) {
    std::vector<T> out(n);
    if (n == 0) return out;
    std::size_t w = workers < 1 ? 1 : static_cast<std::size_t>(workers);
    if (w > n) w = n;

    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::mutex fail_mutex;
    std::size_t fail_index = n;
    std::exception_ptr fail;

    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (i < fail_index) {
                    fail_index = i;
                    fail = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();

    if (fail) std::rethrow_exception(fail);
    return out;
}

}  // namespace nqa
