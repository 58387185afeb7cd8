#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rigidflow {

inline unsigned worker_count() {
    if (const char* e = std::getenv("RIGIDFLOW_THREADS")) {
        int n = std::atoi(e);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(begin,end) over fixed-size chunks. Chunk boundaries do not depend
// on the thread count, so chunk-indexed results are reproducible.
inline void for_chunks(std::size_t n, std::size_t chunk,
                       const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    std::size_t nchunks = (n + chunk - 1) / chunk;
    unsigned nt = std::min<std::size_t>(worker_count(), nchunks);
    if (nt <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) body(c, c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t c = t; c < nchunks; c += nt) body(c, c * chunk, std::min(n, (c + 1) * chunk));
        });
    }
    for (auto& th : pool) th.join();
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    for_chunks(n, 64, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) f(i);
    });
}

// Deterministic sum: per-chunk partials, then added in chunk order.
template <class T>
T chunked_sum(std::size_t n, const std::function<T(std::size_t)>& term, T zero) {
    const std::size_t chunk = 512;
    std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<T> part(nchunks, zero);
    for_chunks(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
        T acc = zero;
        for (std::size_t i = b; i < e; ++i) acc = acc + term(i);
        part[c] = acc;
    });
    T total = zero;
    for (auto& p : part) total = total + p;
    return total;
}

}  // namespace rigidflow
