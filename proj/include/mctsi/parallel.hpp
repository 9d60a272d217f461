#ifndef MCTSI_PARALLEL_HPP
#define MCTSI_PARALLEL_HPP

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace mctsi {

// Thread count resolution: explicit request > MCTSI_THREADS > hardware.
inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MCTSI_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static block split of [begin, end); f(i) must write only to slot i of some
// preallocated output so results are identical for any thread count.
template <typename F>
void parallel_for(std::int64_t begin, std::int64_t end, int threads, F&& f) {
    const std::int64_t count = end - begin;
    if (count <= 0) return;
    threads = resolve_thread_count(threads);
    if (threads > count) threads = static_cast<int>(count);
    if (threads <= 1) {
        for (std::int64_t i = begin; i < end; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const std::int64_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = begin + t * chunk;
        const std::int64_t hi = lo + chunk < end ? lo + chunk : end;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (std::int64_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace mctsi

#endif
