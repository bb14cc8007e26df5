#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sve {

// Splits [0, total) into fixed-width chunks and runs fn(chunk_index, begin,
// end) across a small thread pool. The chunk layout depends only on
// `chunk_size`, never on the thread count, so callers that keep one
// accumulator per chunk and merge them in chunk order get results that are
// bit-identical on any machine.
template <class Fn>
void parallel_chunks(std::size_t total, std::size_t chunk_size, int threads, Fn&& fn) {
    if (total == 0)
        return;
    if (chunk_size == 0)
        chunk_size = 1;
    const std::size_t n_chunks = (total + chunk_size - 1) / chunk_size;
    std::size_t n_workers = threads > 0 ? static_cast<std::size_t>(threads)
                                        : std::thread::hardware_concurrency();
    if (n_workers == 0)
        n_workers = 1;
    n_workers = std::min(n_workers, n_chunks);

    if (n_workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks || failed.load())
                    return;
                try {
                    fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
                } catch (...) {
                    if (!failed.exchange(true))
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failed.load() && first_error)
        std::rethrow_exception(first_error);
}

} // namespace sve
