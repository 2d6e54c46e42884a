#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace bfree {

// Chunked parallel map with deterministic output: results land in a vector
// indexed by chunk, so any later reduction runs in a fixed order no matter
// how chunks were scheduled. fn must be safe to call concurrently.
template <class T, class Fn>
std::vector<T> parallel_map(std::uint64_t n_chunks, unsigned threads, Fn&& fn) {
    std::vector<T> results(n_chunks);
    if (n_chunks == 0) return results;
    if (threads <= 1 || n_chunks == 1) {
        for (std::uint64_t i = 0; i < n_chunks; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= n_chunks) return;
            results[i] = fn(i);
        }
    };
    unsigned n = threads < n_chunks ? threads : static_cast<unsigned>(n_chunks);
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

unsigned default_thread_count();

} // namespace bfree
