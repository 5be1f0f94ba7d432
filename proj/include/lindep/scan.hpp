#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lindep::scan {

// Primes are processed in fixed-size batches; results are folded in index
// order afterwards, so verdicts and reports never depend on scheduling.
inline constexpr std::size_t kBatchSize = 64;

// Serial reference map: out[i] = fn(i). Kept alongside the parallel version
// for testing and benchmarking.
template <class R, class Fn>
std::vector<R> map_serial(std::size_t n, Fn&& fn) {
    std::vector<R> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

// OpenMP map over independent work items. Each item derives its own RNG seed
// from the item index, so the output is identical to map_serial for any
// thread count.
template <class R, class Fn>
std::vector<R> map_parallel(std::size_t n, int threads, Fn&& fn) {
    std::vector<R> out(n);
#ifdef _OPENMP
    #pragma omp parallel for schedule(dynamic, 1) num_threads(threads > 0 ? threads : 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
#else
    (void)threads;
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
#endif
    return out;
}

template <class R, class Fn>
std::vector<R> map_items(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1) return map_serial<R>(n, fn);
    return map_parallel<R>(n, threads, fn);
}

} // namespace lindep::scan
