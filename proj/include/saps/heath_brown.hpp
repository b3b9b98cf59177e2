#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "saps/numeric.hpp"
#include "saps/sieve.hpp"

namespace saps {

// Signed binomial decomposition of Lambda into k0 convolution blocks.
// Term k carries sign (-1)^{k-1} and weight C(k0,k), and convolves one
// log-weighted factor, k-1 plain factors, and k Moebius factors truncated
// at z = (4 x_cap)^{1/k0}.  The identity reproduces Lambda(n) exactly for
// n <= 4 x_cap.
struct HBDecomposition {
    unsigned k0 = 0;
    double x_cap = 0.0;
    double z = 0.0;
    struct Term {
        unsigned k;
        double sign;
        double binom;
    };
    std::vector<Term> terms;
};

inline HBDecomposition make_heath_brown(unsigned k0, double x_cap) {
    if (k0 < 1 || k0 > 4)
        throw std::invalid_argument("heath_brown: k0 must be in {1,2,3,4}");
    if (!(x_cap >= 1.0)) throw std::invalid_argument("heath_brown: need x_cap >= 1");
    HBDecomposition hb;
    hb.k0 = k0;
    hb.x_cap = x_cap;
    // nudge up so an exactly-integer cutoff is never lost to pow() rounding;
    // any z with z^k0 >= 4 x_cap keeps the identity valid
    hb.z = std::pow(4.0 * x_cap, 1.0 / k0) * (1.0 + 1e-12);
    for (unsigned k = 1; k <= k0; ++k) {
        hb.terms.push_back({k, (k % 2 == 1) ? 1.0 : -1.0,
                            static_cast<double>(binomial_u64(k0, k))});
    }
    return hb;
}

namespace detail {

inline int mu_of(std::uint64_t n) {
    if (n == 1) return 1;
    int m = 1;
    for (auto [p, e] : factorize(n)) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

inline std::vector<std::uint64_t> divisors_of(std::uint64_t n) {
    std::vector<std::uint64_t> divs{1};
    for (auto [p, e] : factorize(n)) {
        std::size_t old = divs.size();
        std::uint64_t pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < old; ++j) divs.push_back(divs[j] * pk);
        }
    }
    return divs;
}

// k-fold convolution of the z-truncated Moebius function, single value
inline double mu_z_power(std::uint64_t n, unsigned k, double z,
                         std::map<std::pair<unsigned, std::uint64_t>, double>& memo) {
    if (k == 0) return n == 1 ? 1.0 : 0.0;
    if (k == 1)
        return static_cast<double>(n) <= z ? static_cast<double>(mu_of(n)) : 0.0;
    auto key = std::make_pair(k, n);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    double s = 0.0;
    for (std::uint64_t d : divisors_of(n)) {
        if (static_cast<double>(d) > z) continue;
        int md = mu_of(d);
        if (md != 0) s += md * mu_z_power(n / d, k - 1, z, memo);
    }
    memo.emplace(key, s);
    return s;
}

}  // namespace detail

// Single-n evaluation by divisor descent.  Must equal Lambda(n).
inline double heath_brown_lambda(std::uint64_t n, unsigned k0, double x_cap) {
    HBDecomposition hb = make_heath_brown(k0, x_cap);
    if (n < 1 || static_cast<double>(n) > 4.0 * x_cap)
        throw std::invalid_argument("heath_brown_lambda: need 1 <= n <= 4 x_cap");
    std::map<std::pair<unsigned, std::uint64_t>, double> memo;
    auto divs = detail::divisors_of(n);
    double total = 0.0;
    for (const auto& term : hb.terms) {
        // sum over n = a * b * c of log(a) tau_{k-1}(b) (mu_z^{*k})(c)
        double s = 0.0;
        for (std::uint64_t a : divs) {
            if (a == 1) continue;  // log 1 = 0
            double la = std::log(static_cast<double>(a));
            std::uint64_t rest = n / a;
            for (std::uint64_t b : detail::divisors_of(rest)) {
                double tb = term.k == 1 ? (b == 1 ? 1.0 : 0.0)
                                        : static_cast<double>(tau_m(term.k - 1, b));
                if (tb == 0.0) continue;
                double mc = detail::mu_z_power(rest / b, term.k, hb.z, memo);
                if (mc != 0.0) s += la * tb * mc;
            }
        }
        total += term.sign * term.binom * s;
    }
    return total;
}

// Bulk evaluation over [1, nmax] via array Dirichlet convolutions; index n
// of the result holds the decomposition value at n.
inline std::vector<double> heath_brown_table(std::uint64_t nmax, const HBDecomposition& hb) {
    if (static_cast<double>(nmax) > 4.0 * hb.x_cap)
        throw std::invalid_argument("heath_brown_table: nmax exceeds 4 x_cap");
    std::size_t N = static_cast<std::size_t>(nmax);
    SieveSegment seg = build_segment(2, nmax + 1);

    auto convolve = [N](const std::vector<double>& f, const std::vector<double>& g) {
        std::vector<double> out(N + 1, 0.0);
        for (std::size_t a = 1; a <= N; ++a) {
            double fa = f[a];
            if (fa == 0.0) continue;
            for (std::size_t b = 1; a * b <= N; ++b) {
                if (g[b] != 0.0) out[a * b] += fa * g[b];
            }
        }
        return out;
    };

    std::vector<double> logs(N + 1, 0.0), ones(N + 1, 1.0), muz(N + 1, 0.0);
    ones[0] = 0.0;
    for (std::size_t n = 2; n <= N; ++n) logs[n] = std::log(static_cast<double>(n));
    muz[1] = 1.0;
    for (std::size_t n = 2; n <= N; ++n)
        if (static_cast<double>(n) <= hb.z) muz[n] = seg.mu_at(n);

    std::vector<double> total(N + 1, 0.0);
    for (const auto& term : hb.terms) {
        std::vector<double> acc = logs;
        for (unsigned i = 1; i < term.k; ++i) acc = convolve(acc, ones);
        for (unsigned i = 0; i < term.k; ++i) acc = convolve(acc, muz);
        double w = term.sign * term.binom;
        for (std::size_t n = 1; n <= N; ++n) total[n] += w * acc[n];
    }
    return total;
}

}  // namespace saps
