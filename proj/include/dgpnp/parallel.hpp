#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace dgpnp {

/// Worker count from DGPNP_THREADS (default 1).
inline int thread_count()
{
    if (const char* env = std::getenv("DGPNP_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (...) {
            return 1;
        }
    }
    return 1;
}

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// fn(begin, end, chunk) for each. Chunk c always covers the same range for a
/// given worker count, so per-chunk results concatenated by chunk index are
/// in serial order.
template <typename Fn>
void parallel_chunks(int n, int workers, Fn&& fn)
{
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        fn(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int c = 0; c < workers; ++c) {
        const int begin = static_cast<int>(static_cast<long long>(n) * c / workers);
        const int end = static_cast<int>(static_cast<long long>(n) * (c + 1) / workers);
        pool.emplace_back([&fn, &errors, begin, end, c] {
            try {
                fn(begin, end, c);
            } catch (...) {
                errors[static_cast<std::size_t>(c)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace dgpnp
