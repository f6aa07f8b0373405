#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace trimsearch {

/// Global worker cap shared by all parallel helpers. 0 means "hardware default".
/// The CLI sets this from --threads / TRIMSEARCH_THREADS.
inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0};
    return cap;
}

inline unsigned effective_threads(std::size_t work_items) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0)
        hw = 1;
    unsigned cap = thread_cap().load();
    if (cap == 0)
        cap = hw;
    return static_cast<unsigned>(std::min<std::size_t>(cap, std::max<std::size_t>(work_items, 1)));
}

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
/// worker, so results written by index are deterministic for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0)
        return;
    const unsigned workers = effective_threads(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i)
                fn(i);
        });
    }
    for (auto& t : pool)
        t.join();
}

} // namespace trimsearch
