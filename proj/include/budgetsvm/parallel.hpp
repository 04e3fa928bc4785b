#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace budgetsvm {

/// Worker count: BUDGETSVM_THREADS if set and positive, else hardware concurrency.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("BUDGETSVM_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/**
 * Sums fn(begin, end) over fixed chunks of [0, count). The chunking does not
 * depend on the worker count, and partial sums are added in chunk order, so
 * the result is bit-identical for any number of threads.
 */
template <class Fn>
double chunked_sum(std::size_t count, std::size_t chunk, Fn fn) {
    if (count == 0) return 0.0;
    const std::size_t chunks = (count + chunk - 1) / chunk;
    std::vector<double> partial(chunks, 0.0);
    auto run = [&](std::size_t first_chunk, std::size_t stride) {
        for (std::size_t c = first_chunk; c < chunks; c += stride)
            partial[c] = fn(c * chunk, std::min(count, (c + 1) * chunk));
    };
    const std::size_t workers = std::min(worker_count(), chunks);
    if (workers <= 1) {
        run(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace budgetsvm
