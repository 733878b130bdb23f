#ifndef GNMN_PARALLEL_HPP
#define GNMN_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace gnmn::detail {

// Splits [0, n) into contiguous chunks, one per worker. Callers write only to
// indices inside their own chunk, so the result does not depend on `threads`.
template <class Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn)
{
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
}

} // namespace gnmn::detail

#endif // GNMN_PARALLEL_HPP
