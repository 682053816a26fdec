#pragma once

// Deterministic parallel replication: each replicate owns a derived RNG
// stream and writes only its own slot, so results do not depend on the
// worker count or scheduling.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace randpoly {

inline int default_thread_count() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename F>
void parallel_replicates(int reps, int threads, F&& body) {
    if (threads <= 1 || reps <= 1) {
        for (int k = 0; k < reps; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= reps) return;
            try {
                body(k);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(threads, reps);
    pool.reserve(static_cast<size_t>(nw));
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace randpoly
