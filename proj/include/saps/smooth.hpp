#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "saps/numeric.hpp"
#include "saps/quadrature.hpp"

namespace saps {

enum class BumpKind {
    standard,  // exp(-1/(t(1-t))) rescaled to [1,2]
};

// Smooth dyadic partition of unity.  g~ is a C^inf bump on [1,2] normalized
// so that int g~(u) du/u = 1; then g(x) = int_1^2 g~(x/u) du/u is supported
// on [1,4], takes values in [0,1], and satisfies sum_j g(x/2^j) = 1 for all
// x > 0.
class SmoothWindow {
  public:
    explicit SmoothWindow(BumpKind kind = BumpKind::standard) : kind_(kind) {
        norm_ = 1.0;
        norm_ = integrate([this](double u) { return bump(u) / u; }, 1.0, 2.0, 1e-14);
    }

    BumpKind kind() const { return kind_; }

    // normalized g~
    double bump(double u) const {
        double t = u - 1.0;
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::exp(-1.0 / (t * (1.0 - t))) / norm_;
    }

    // g(x), adaptive quadrature at 1e-12 absolute tolerance, memoized
    double value(double x) const {
        if (!(x > 1.0) || !(x < 4.0)) return 0.0;
        std::uint64_t key = std::bit_cast<std::uint64_t>(x);
        {
            std::lock_guard<std::mutex> lock(memo_mutex_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        double lo = std::max(1.0, x / 2.0);
        double hi = std::min(2.0, x);
        double v = lo < hi
                       ? integrate([this, x](double u) { return bump(x / u) / u; }, lo,
                                   hi, 1e-12)
                       : 0.0;
        std::lock_guard<std::mutex> lock(memo_mutex_);
        memo_.emplace(key, v);
        return v;
    }

    double operator()(double x) const { return value(x); }

    // sum_j g(x / 2^j); at most three dyadic scales contribute
    double partition_sum(double x) const {
        if (!(x > 0)) throw std::invalid_argument("partition_sum requires x > 0");
        int j0 = static_cast<int>(std::floor(std::log2(x)));
        double s = 0.0;
        for (int j = j0 - 3; j <= j0 + 1; ++j) s += value(std::ldexp(x, -j));
        return s;
    }

    // int_1^2 g~(t) (log t)^i t^{w-1} dt
    cplx bump_mellin(cplx w, unsigned i = 0) const {
        return integrate_complex(
            [this, w, i](double t) {
                double b = bump(t);
                if (b == 0.0) return cplx{0.0, 0.0};
                double lt = std::log(t);
                double li = 1.0;
                for (unsigned k = 0; k < i; ++k) li *= lt;
                return b * li * std::exp((w - 1.0) * lt);
            },
            1.0, 2.0, 1e-13);
    }

    // hat{g}_m(w) = int_0^infty g(u) (log u)^m u^{w-1} du, for m <= 2.
    // Writing g as the multiplicative convolution of g~ with 1_{[1,2]} gives
    // hat{g}(w) = bump_mellin(w) * (2^w - 1)/w, and derivatives in w add the
    // log factors.
    cplx mellin(cplx w, unsigned m = 0) const {
        if (m > 2) throw std::invalid_argument("mellin: log power must be <= 2");
        const double L = std::numbers::ln2;
        cplx tw = std::exp(w * L);  // 2^w
        cplx P0 = (tw - 1.0) / w;
        if (m == 0) return bump_mellin(w, 0) * P0;
        cplx P1 = L * tw / w - (tw - 1.0) / (w * w);
        if (m == 1) return bump_mellin(w, 1) * P0 + bump_mellin(w, 0) * P1;
        cplx P2 = L * L * tw / w - 2.0 * L * tw / (w * w) + 2.0 * (tw - 1.0) / (w * w * w);
        return bump_mellin(w, 2) * P0 + 2.0 * bump_mellin(w, 1) * P1 +
               bump_mellin(w, 0) * P2;
    }

    // memoized mellin(); contour integrations hit the same w grid repeatedly
    cplx mellin_cached(cplx w, unsigned m = 0) const {
        MellinKey key{std::bit_cast<std::uint64_t>(w.real()),
                      std::bit_cast<std::uint64_t>(w.imag()), m};
        {
            std::lock_guard<std::mutex> lock(mellin_mutex_);
            auto it = mellin_memo_.find(key);
            if (it != mellin_memo_.end()) return it->second;
        }
        cplx v = mellin(w, m);
        std::lock_guard<std::mutex> lock(mellin_mutex_);
        mellin_memo_.emplace(key, v);
        return v;
    }

  private:
    struct MellinKey {
        std::uint64_t re_bits, im_bits;
        unsigned m;
        bool operator==(const MellinKey&) const = default;
    };
    struct MellinKeyHash {
        std::size_t operator()(const MellinKey& k) const {
            std::uint64_t h = splitmix64(k.re_bits);
            h = splitmix64(h ^ k.im_bits);
            return splitmix64(h ^ k.m);
        }
    };

    BumpKind kind_;
    double norm_;
    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<std::uint64_t, double> memo_;
    mutable std::mutex mellin_mutex_;
    mutable std::unordered_map<MellinKey, cplx, MellinKeyHash> mellin_memo_;
};

inline SmoothWindow make_smooth_window(BumpKind kind = BumpKind::standard) {
    return SmoothWindow(kind);
}

inline double partition_check(const SmoothWindow& w, double x) {
    return w.partition_sum(x);
}

}  // namespace saps
