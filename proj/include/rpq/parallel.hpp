#pragma once

// Chunked parallel-for over an index range.  Workers claim chunks from an
// atomic counter; callers keep per-chunk results and merge them in chunk
// order, so the outcome does not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace rpq {

inline int worker_count() {
    if (const char *env = std::getenv("RPQ_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

template <typename Fn>
void parallel_chunks(std::size_t n_items, std::size_t chunk_size, Fn &&fn) {
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    const int workers = std::min<std::size_t>(worker_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size));
            }
        });
    for (auto &t : pool) t.join();
}

}  // namespace rpq
