#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace medianscape {

/// Worker count for parallel loops. Defaults to the hardware concurrency,
/// overridable with the MEDIANSCAPE_WORKERS environment variable or
/// set_worker_count(). Results never depend on the worker count: loops
/// partition the index range statically and every reduction below combines
/// per-block results in block order.
unsigned worker_count();
void set_worker_count(unsigned n);

namespace detail {
inline unsigned& worker_override()
{
    static unsigned n = 0;
    return n;
}
} // namespace detail

inline unsigned worker_count()
{
    if (detail::worker_override() > 0)
        return detail::worker_override();
    if (const char* env = std::getenv("MEDIANSCAPE_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

inline void set_worker_count(unsigned n)
{
    detail::worker_override() = n;
}

/// Runs body(i) for i in [0, n). Static block partition, one thread per block.
template <class Body>
void parallel_for(std::size_t n, Body&& body)
{
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i)
                body(i);
        });
    }
    for (auto& t : pool)
        t.join();
}

/// Parallel max-reduction of f(i) over [0, n); init is returned for n == 0.
/// Deterministic: per-block maxima are combined in block order.
template <class F>
double parallel_max(std::size_t n, double init, F&& f)
{
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1 || n < 64) {
        double m = init;
        for (std::size_t i = 0; i < n; ++i)
            m = std::max(m, f(i));
        return m;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<double> block(workers, init);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, w, init, &block, &f] {
            double m = init;
            for (std::size_t i = lo; i < hi; ++i)
                m = std::max(m, f(i));
            block[w] = m;
        });
    }
    for (auto& t : pool)
        t.join();
    double m = init;
    for (double b : block)
        m = std::max(m, b);
    return m;
}

} // namespace medianscape
