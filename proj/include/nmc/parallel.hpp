#ifndef NMC_PARALLEL_HPP
#define NMC_PARALLEL_HPP

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace nmc {

// Runs fn(0..n_items-1), possibly on several threads. Work items must be
// independent and write only to their own index-addressed slots; callers then
// reduce in index order, so the result is identical for every thread count.
inline void parallel_for(int n_items, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n_items));
    if (threads <= 1) {
        for (int i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n_items; i += threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace nmc

#endif
