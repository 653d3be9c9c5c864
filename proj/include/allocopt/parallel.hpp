#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

// Chunked parallel-for over an index range. Workers write into caller-owned
// slots indexed by i, so the reduction order (and therefore every report) is
// identical no matter how many threads ran.

namespace allocopt {

// Thread budget: explicit request, capped by ALLOCOPT_THREADS when set.
// requested = 0 means "use the cap, or hardware concurrency".
inline unsigned resolve_threads(unsigned requested) {
    unsigned cap = 0;
    if (const char* env = std::getenv("ALLOCOPT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) cap = static_cast<unsigned>(v);
    }
    unsigned n = requested != 0 ? requested
                                : (cap != 0 ? cap : std::max(1u, std::thread::hardware_concurrency()));
    if (cap != 0) n = std::min(n, cap);
    return std::max(1u, n);
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::min<std::size_t>(std::max(1u, threads), count == 0 ? 1 : count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace allocopt
