#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace saps {

using cplx = std::complex<double>;

// Neumaier-compensated accumulator.  Log-weighted interval sums cancel
// heavily, so every sum over a window goes through one of these.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct CompensatedComplexSum {
    CompensatedSum re, im;
    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

inline std::uint64_t isqrt_u64(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

inline std::uint64_t binomial_u64(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;  // exact: numerator always divisible
    }
    return r;
}

// splitmix64, used to derive independent per-index RNG streams from one seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Runs fn(i) for i in [0, n).  Results must be written to preallocated
// per-index slots so the merge order is deterministic.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// Half-open window convention: every interval sum in this project runs over
// integers n with y < n <= y + h.  This is the single place that maps the
// real endpoints to an integer range.
struct IntWindow {
    std::uint64_t first = 1;  // inclusive
    std::uint64_t last = 0;   // inclusive; first > last means empty
    bool empty() const { return first > last; }
};

inline IntWindow window_integers(double y, double h) {
    if (y < 0 || h <= 0) return {};
    double top = y + h;
    IntWindow w;
    w.first = static_cast<std::uint64_t>(std::floor(y)) + 1;
    if (top < 1.0) return {};
    w.last = static_cast<std::uint64_t>(std::floor(top));
    // guard against floor(y)+1 <= y when y is integral-valued plus epsilon
    while (static_cast<double>(w.first) <= y) ++w.first;
    while (w.last > 0 && static_cast<double>(w.last) > top) --w.last;
    return w;
}

}  // namespace saps
