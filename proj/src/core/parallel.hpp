#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace sdd::detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Split [0, total) into `chunks` contiguous ranges and hand them to at most
/// `threads` workers. The partition depends only on `chunks`, so callers that
/// reduce per-chunk results in chunk order get answers independent of the
/// thread count.
inline void run_chunked(std::int64_t total, int threads, int chunks,
                        const std::function<void(int, std::int64_t, std::int64_t)>& body) {
    if (total <= 0) return;
    const int nchunks = static_cast<int>(std::min<std::int64_t>(chunks, total));
    auto chunk_range = [&](int c) {
        const std::int64_t begin = total * c / nchunks;
        const std::int64_t end = total * (c + 1) / nchunks;
        return std::pair(begin, end);
    };

    const int nthreads = std::min(resolve_threads(threads), nchunks);
    if (nthreads <= 1) {
        for (int c = 0; c < nchunks; ++c) {
            auto [begin, end] = chunk_range(c);
            body(c, begin, end);
        }
        return;
    }

    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        workers.emplace_back([&] {
            for (int c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1)) {
                auto [begin, end] = chunk_range(c);
                body(c, begin, end);
            }
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace sdd::detail
