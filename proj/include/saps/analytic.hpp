#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "saps/characters.hpp"
#include "saps/coeffs.hpp"
#include "saps/numeric.hpp"
#include "saps/quadrature.hpp"
#include "saps/smooth.hpp"

namespace saps {

// ---------------------------------------------------------------------------
// complex gamma (Lanczos, g = 607/128, 15 terms; ~1e-14 relative)

namespace detail {

inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

inline cplx log_gamma_positive(cplx z) {
    // requires Re z >= 0.5
    cplx a = kLanczos[0];
    for (int k = 1; k < 15; ++k) a += kLanczos[k] / (z - 1.0 + static_cast<double>(k));
    cplx t = z + (kLanczosG - 0.5);
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z - 0.5) * std::log(t) - t +
           std::log(a);
}

}  // namespace detail

// exp(log_gamma(z)) = Gamma(z); the log itself may differ from the principal
// branch by multiples of 2 pi i
inline cplx log_gamma(cplx z) {
    if (z.real() >= 0.5) return detail::log_gamma_positive(z);
    // reflection; safe for |Im z| well below ~400
    cplx s = std::sin(std::numbers::pi * z);
    if (s == cplx(0.0, 0.0)) throw std::domain_error("log_gamma: pole at nonpositive integer");
    return std::log(std::numbers::pi) - std::log(s) - detail::log_gamma_positive(1.0 - z);
}

inline cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

// gamma(s, chi) = Gamma(s) cos(pi (s - a) / 2), a in {0,1}.
// At nonpositive integers where the cosine zero cancels the Gamma pole the
// finite limit is returned; surviving poles raise domain_error.
inline cplx gamma_factor(cplx s, int a) {
    if (a != 0 && a != 1) throw std::invalid_argument("gamma_factor: parity must be 0 or 1");
    double re = s.real();
    if (s.imag() == 0.0 && re <= 0.0 && re == std::floor(re)) {
        auto n = static_cast<long>(-re);
        bool cancelled = (a == 0) ? (n % 2 == 1) : (n % 2 == 0);
        if (!cancelled) throw std::domain_error("gamma_factor: pole of Gamma survives");
        // residue (-1)^n / n! times the cosine derivative at -n
        double res = (n % 2 == 0) ? 1.0 : -1.0;
        for (long k = 2; k <= n; ++k) res /= static_cast<double>(k);
        double deriv = -0.5 * std::numbers::pi *
                       std::sin(0.5 * std::numbers::pi * static_cast<double>(-n - a));
        return cplx(res * deriv, 0.0);
    }
    return gamma_fn(s) * std::cos(0.5 * std::numbers::pi * (s - static_cast<double>(a)));
}

// ---------------------------------------------------------------------------
// Hurwitz zeta by Euler-Maclaurin with 12 Bernoulli corrections

namespace detail {

inline constexpr double kBernoulli2j[13] = {
    0.0,                       // unused
    1.0 / 6.0,                 // B2
    -1.0 / 30.0,               // B4
    1.0 / 42.0,                // B6
    -1.0 / 30.0,               // B8
    5.0 / 66.0,                // B10
    -691.0 / 2730.0,           // B12
    7.0 / 6.0,                 // B14
    -3617.0 / 510.0,           // B16
    43867.0 / 798.0,           // B18
    -174611.0 / 330.0,         // B20
    854513.0 / 138.0,          // B22
    -236364091.0 / 2730.0};    // B24

// shift count: far enough out that 12 corrections reach ~1e-12 even at the
// edge of the |Im s| <= 50 box (a flat threshold of 20 falls short there)
inline int hurwitz_shift(cplx s, double alpha) {
    double need = std::max(20.0, 0.8 * std::abs(s.imag()) + 14.0);
    int K = static_cast<int>(std::ceil(need - alpha));
    return std::max(K, 1);
}

// the Euler-Maclaurin pieces of zeta(s, alpha) shifted by K, excluding the
// pole part (K+alpha)^{1-s}/(s-1)
inline cplx hurwitz_regular(cplx s, double alpha, int K) {
    CompensatedComplexSum head;
    for (int k = 0; k < K; ++k)
        head.add(std::exp(-s * std::log(static_cast<double>(k) + alpha)));
    double X = static_cast<double>(K) + alpha;
    double lX = std::log(X);
    cplx tail = 0.5 * std::exp(-s * lX);
    cplx fac = std::exp(-s * lX) / X;  // (s)_1 X^{-s-1} seed without s
    cplx poch = s;
    double factdenom = 1.0;
    for (int j = 1; j <= 12; ++j) {
        factdenom *= (2.0 * j) * (2.0 * j - 1.0);
        tail += kBernoulli2j[j] / factdenom * poch * fac;
        poch *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
        fac /= X * X;
    }
    return head.value() + tail;
}

}  // namespace detail

inline cplx hurwitz_zeta(cplx s, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("hurwitz_zeta: need alpha > 0");
    if (std::abs(s - cplx(1.0, 0.0)) < 1e-12)
        throw std::domain_error("hurwitz_zeta: pole at s = 1");
    int K = detail::hurwitz_shift(s, alpha);
    double X = static_cast<double>(K) + alpha;
    cplx pole = std::exp((1.0 - s) * std::log(X)) / (s - 1.0);
    return detail::hurwitz_regular(s, alpha, K) + pole;
}

// L(s, chi) through the decomposition q^{-s} sum_a chi(a) zeta(s, a/q).
// Near s = 1 the per-term poles cancel for nonprincipal chi and are summed
// in closed form; principal characters keep the pole.
inline cplx l_value(cplx s, const DirichletCharacter& chi) {
    std::uint64_t q = chi.modulus();
    bool near_pole = std::abs(s - cplx(1.0, 0.0)) < 1e-4;
    if (near_pole && chi.is_principal())
        throw std::domain_error("l_value: pole at s = 1 for principal character");
    if (q == 1) return hurwitz_zeta(s, 1.0);

    if (!near_pole) {
        CompensatedComplexSum sum;
        for (std::uint64_t a = 1; a <= q; ++a) {
            cplx c = chi.eval(a);
            if (c == cplx(0.0, 0.0)) continue;
            sum.add(c * hurwitz_zeta(s, static_cast<double>(a) / static_cast<double>(q)));
        }
        return std::exp(-s * std::log(static_cast<double>(q))) * sum.value();
    }

    // shared shift so the 1/(s-1) parts cancel exactly across residues
    int K = detail::hurwitz_shift(s, 1.0 / static_cast<double>(q));
    CompensatedComplexSum sum;
    for (std::uint64_t a = 1; a <= q; ++a) {
        cplx c = chi.eval(a);
        if (c == cplx(0.0, 0.0)) continue;
        double alpha = static_cast<double>(a) / static_cast<double>(q);
        double L = std::log(static_cast<double>(K) + alpha);
        // (K+alpha)^{1-s}/(s-1) minus its 1/(s-1) singular term, as a series
        cplx w = s - 1.0;
        cplx reg{0.0, 0.0};
        double Lp = L;       // L^{m+1}
        double fact = 1.0;   // (m+1)!
        double sign = -1.0;
        cplx wp{1.0, 0.0};
        for (int m = 0; m <= 6; ++m) {
            fact *= (m + 1);
            reg += sign * Lp / fact * wp;
            sign = -sign;
            Lp *= L;
            wp *= w;
        }
        sum.add(c * (detail::hurwitz_regular(s, alpha, K) + reg));
    }
    return std::exp(-s * std::log(static_cast<double>(q))) * sum.value();
}

// epsilon_chi = tau(chi) / (i^a sqrt(q)); modulus 1 for primitive chi
inline cplx root_number(const DirichletCharacter& chi) {
    cplx tau = gauss_sum(chi);  // validates primitivity, q > 1
    cplx ia = chi.parity() == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    return tau / (ia * std::sqrt(static_cast<double>(chi.modulus())));
}

// residual of L(1-s, chi) = (2 eps/sqrt(q)) (q/2pi)^s gamma(s,chi) L(s, conj chi)
inline double functional_equation_residual(cplx s, const DirichletCharacter& chi) {
    std::uint64_t q = chi.modulus();
    cplx lhs = l_value(1.0 - s, chi);
    cplx eps = root_number(chi);
    cplx rhs = 2.0 * eps / std::sqrt(static_cast<double>(q)) *
               std::exp(s * std::log(static_cast<double>(q) / (2.0 * std::numbers::pi))) *
               gamma_factor(s, chi.parity()) * l_value(s, conj_character(chi));
    return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// approximate functional equation of the smoothed character sum

struct AFEInstance {
    DirichletCharacter chi;          // primitive, q > 1
    double N = 100.0;                // length scale; support [N, 4N]
    double t = 0.0;                  // ordinate of s0 = 1/2 + it
    unsigned r = 0;                  // log power
    const SmoothWindow* window = nullptr;
    double delta = 0.5;
    double T = 2.0;                  // |t| <= T, T >= 2
    // transformed-side controls
    int n_cap = 64;
    double contour_sigma = 1.25;
    double tail_shift = 4.0;         // line used for the tail estimate

    double M() const {
        double qt = static_cast<double>(chi.modulus()) * std::max(T, std::abs(t));
        return std::max(1.0, std::pow(qt / N, 1.0 + delta));
    }
};

struct AFETransformed {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;  // bound on the dropped n > n_cap terms
};

// LHS: sum_n g(n/N) chi(n) (log n)^r n^{-1/2-it}, exact finite sum
inline cplx afe_smoothed_sum(const AFEInstance& inst) {
    if (!inst.window) throw std::invalid_argument("afe: missing smooth window");
    auto lo = static_cast<std::uint64_t>(std::max(1.0, std::ceil(inst.N)));
    auto hi = static_cast<std::uint64_t>(std::floor(4.0 * inst.N));
    CompensatedComplexSum s;
    for (std::uint64_t n = lo; n <= hi; ++n) {
        double gv = inst.window->value(static_cast<double>(n) / inst.N);
        if (gv == 0.0) continue;
        cplx c = inst.chi.eval(n);
        if (c == cplx(0.0, 0.0)) continue;
        double ln = std::log(static_cast<double>(n));
        double w = gv;
        for (unsigned i = 0; i < inst.r; ++i) w *= ln;
        s.add(w * c * std::polar(1.0 / std::sqrt(static_cast<double>(n)), -inst.t * ln));
    }
    return s.value();
}

namespace detail {

// Vertical-line machinery for the transformed sum.  Nodes live on a fixed
// Gauss-Kronrod grid (panel width a power of two, anchored at 0) so that the
// gamma-factor and mellin values are shared across all n of an instance and
// across instances with the same line.
class AFEContour {
  public:
    AFEContour(const AFEInstance& inst, double c, unsigned m, double width = 0.0,
               double stop_rel = 1e-7)
        : inst_(inst),
          c_(c),
          m_(m),
          width_(width > 0.0 ? width : default_width()),
          stop_rel_(stop_rel) {}

    // integral over Re s = c of x^s gamma(s,chi) ghat_m(conj(s0) - s) ds / i,
    // i.e. the real-parameter integral over v with s = c + iv
    cplx integrate_line(double x) {
        ensure_nodes();
        double lx = std::log(x);
        CompensatedComplexSum s;
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            s.add(weights_[k] * std::exp(cplx(c_, nodes_[k]) * lx) * factors_[k]);
        return s.value();
    }

    // same integral on a grid twice as fine (resolution check)
    cplx integrate_line_refined(double x) const {
        AFEContour fine(inst_, c_, m_, width_ / 2.0, stop_rel_);
        return fine.integrate_line(x);
    }

    double width() const { return width_; }

    // int |gamma(c+iv, chi) ghat_m(...)| dv, without any x^c weight
    double abs_line_integral() {
        ensure_nodes();
        double out = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            out += weights_[k] * std::abs(factors_[k]);
        return out;
    }

    // bound on the |v| > V remainder of |x^s gamma ghat| for x <= x1
    double dropped_tail_bound(double x1) const {
        return std::pow(x1, c_) * edge_value_ * 80.0;
    }

    double extent() const { return extent_; }

  private:
    double default_width() const {
        double q = static_cast<double>(inst_.chi.modulus());
        double rate =
            std::abs(std::log(q / (2.0 * std::numbers::pi * inst_.n_cap * inst_.N)));
        double w = std::numbers::pi / (rate + 8.0);
        return std::ldexp(1.0, static_cast<int>(std::floor(std::log2(w))));
    }

    cplx factor_at(double v) const {
        cplx s(c_, v);
        cplx w(0.5 - c_, -(inst_.t + v));
        return gamma_factor(s, inst_.chi.parity()) * inst_.window->mellin_cached(w, m_);
    }

    void ensure_nodes() {
        if (!nodes_.empty()) return;
        double width = width_;

        // extend symmetrically until the factor magnitude at the edge is
        // negligible against the peak near v = 0
        double peak = std::abs(factor_at(0.0)) + std::abs(factor_at(2.0)) +
                      std::abs(factor_at(-2.0));
        peak = std::max(peak, 1e-12);
        double V = 24.0;
        for (;;) {
            double edge = std::max(std::abs(factor_at(V)), std::abs(factor_at(-V)));
            if (edge < stop_rel_ * peak) {
                edge_value_ = edge;
                break;
            }
            V += 16.0;
            if (V > 400.0)
                throw QuadratureError("afe contour: transform tail does not decay");
        }
        extent_ = V;

        auto panels = static_cast<long>(std::ceil(V / width));
        nodes_.reserve(2 * panels * 15);
        for (long p = -panels; p < panels; ++p) {
            double a = width * static_cast<double>(p);
            double mid = a + width / 2.0, half = width / 2.0;
            for (int i = 0; i < 15; ++i) {
                nodes_.push_back(mid + half * kKronrodNodes15(i));
                weights_.push_back(half * kKronrodWeights15(i));
            }
        }
        factors_.resize(nodes_.size());
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            factors_[k] = factor_at(nodes_[k]);
    }

    static double kKronrodNodes15(int i) { return saps::detail::kKronrodNodes[i]; }
    static double kKronrodWeights15(int i) { return saps::detail::kKronrodWeights[i]; }

    const AFEInstance& inst_;
    double c_;
    unsigned m_;
    double width_ = 0.0;
    double stop_rel_ = 1e-7;
    double extent_ = 0.0;
    double edge_value_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<cplx> factors_;
};

}  // namespace detail

// RHS of the pre-truncation identity:
//   (eps_chi N^{conj s0} / (sqrt(q) pi i)) sum_n conj(chi)(n) I_n,
//   I_n = int_{Re s = c} (q/(2 pi n N))^s gamma(s,chi) ghat(conj(s0) - s) ds,
// with (log n)^r handled by the binomial split against log N.
inline AFETransformed afe_transformed_sum(const AFEInstance& inst) {
    if (!inst.window) throw std::invalid_argument("afe: missing smooth window");
    if (!inst.chi.is_primitive() || inst.chi.modulus() <= 1)
        throw std::invalid_argument("afe: character must be primitive mod q > 1");
    double q = static_cast<double>(inst.chi.modulus());
    auto chibar = conj_character(inst.chi);
    cplx eps = root_number(inst.chi);
    cplx Ns0 = std::exp(cplx(0.5, -inst.t) * std::log(inst.N));  // N^{conj s0}
    cplx prefactor = eps * Ns0 / (std::sqrt(q) * std::numbers::pi);

    AFETransformed out;
    double pref_abs = std::abs(prefactor);

    for (unsigned j = 0; j <= inst.r; ++j) {
        unsigned m = inst.r - j;
        double binom = static_cast<double>(binomial_u64(inst.r, j));
        double logNj = std::pow(std::log(inst.N), static_cast<double>(j));
        detail::AFEContour contour(inst, inst.contour_sigma, m);

        CompensatedComplexSum sum;
        for (int n = 1; n <= inst.n_cap; ++n) {
            cplx cb = chibar.eval(static_cast<std::uint64_t>(n));
            if (cb == cplx(0.0, 0.0)) continue;
            double x = q / (2.0 * std::numbers::pi * n * inst.N);
            sum.add(cb * contour.integrate_line(x));
        }

        // resolution check at the fastest-oscillating term
        double x_worst = q / (2.0 * std::numbers::pi * inst.n_cap * inst.N);
        cplx coarse = contour.integrate_line(x_worst);
        cplx fine = contour.integrate_line_refined(x_worst);
        if (std::abs(coarse - fine) > 1e-9 * (1.0 + std::abs(coarse)))
            throw QuadratureError("afe contour quadrature did not converge");

        out.value += prefactor * binom * logNj * sum.value();

        // |v| > V remainder of the kept terms
        double x1 = q / (2.0 * std::numbers::pi * inst.N);
        out.tail_bound +=
            pref_abs * binom * logNj * 4.6 * contour.dropped_tail_bound(x1);

        // dropped n > n_cap terms, bounded on the shifted line Re s = A.
        // The loose cutoff misses a sub-percent slice of the |.| mass; pad it.
        detail::AFEContour tail_contour(inst, inst.tail_shift, m, 0.0, 1e-3);
        double W = 1.05 * tail_contour.abs_line_integral();
        double A = inst.tail_shift;
        double x_first = q / (2.0 * std::numbers::pi * (inst.n_cap + 1) * inst.N);
        double geom = (inst.n_cap + 1) / (A - 1.0);
        out.tail_bound +=
            pref_abs * binom * logNj * std::pow(x_first, A) * W * (1.0 + geom);
    }
    return out;
}

// the lemma's comparison integral: int |sum_{n<=M} chi(n) n^{-1/2-i(u+t)}| du/(1+u^2)
inline double afe_bound_integral(const AFEInstance& inst) {
    auto M = static_cast<std::uint64_t>(std::floor(inst.M()));
    const auto& chi = inst.chi;
    auto poly_abs = [&](double u) {
        CompensatedComplexSum s;
        for (std::uint64_t n = 1; n <= M; ++n) {
            cplx c = chi.eval(n);
            if (c == cplx(0.0, 0.0)) continue;
            double ln = std::log(static_cast<double>(n));
            s.add(c * std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                                 -(u + inst.t) * ln));
        }
        return std::abs(s.value()) / (1.0 + u * u);
    };
    double U = 50.0 * std::sqrt(static_cast<double>(M) + 1.0);
    double out = 0.0;
    int panels = std::max(32, static_cast<int>(U / 4.0));
    for (int k = 0; k < panels; ++k) {
        double a = -U + 2.0 * U * k / panels, b = -U + 2.0 * U * (k + 1) / panels;
        out += integrate(poly_abs, a, b, 1e-9);
    }
    return out;
}

// int_{-M^2}^{M^2} |sum_{n<=M} chi(n) n^{-1/2-i(u+t)}|^2 du
inline double afe_mean_square(const DirichletCharacter& chi, std::uint64_t M, double t) {
    std::vector<cplx> coef;
    std::vector<double> logs;
    for (std::uint64_t n = 1; n <= M; ++n) {
        cplx c = chi.eval(n);
        if (c == cplx(0.0, 0.0)) continue;
        coef.push_back(c / std::sqrt(static_cast<double>(n)));
        logs.push_back(std::log(static_cast<double>(n)));
    }
    double R = static_cast<double>(M) * static_cast<double>(M);
    double step = 0.05 / std::max(1.0, std::log(static_cast<double>(M)));
    auto nsteps = static_cast<std::size_t>(std::ceil(2.0 * R / step));
    step = 2.0 * R / static_cast<double>(nsteps);
    // trapezoid on the uniform grid, rotation recurrence per term
    std::vector<cplx> val(nsteps + 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < coef.size(); ++i) {
        cplx cur = coef[i] * std::polar(1.0, -(-R + 0.0) * logs[i] - t * logs[i]);
        cplx rot = std::polar(1.0, -step * logs[i]);
        for (std::size_t k = 0; k <= nsteps; ++k) {
            val[k] += cur;
            cur *= rot;
        }
    }
    CompensatedSum s;
    for (std::size_t k = 0; k <= nsteps; ++k) {
        double w = (k == 0 || k == nsteps) ? 0.5 : 1.0;
        s.add(w * std::norm(val[k]));
    }
    return s.value() * step;
}

// ---------------------------------------------------------------------------
// truncated Perron integral

struct PerronResult {
    cplx value{0.0, 0.0};
    double truncation_error = 0.0;  // estimate for the |Im s| > T0 remainder
};

// (1/2pi i) int_{1/2 - i T0}^{1/2 + i T0} F(s) z^s / s ds with
// F(s) = sum_n a_n chi(n) n^{-1/2} n^{-(s-1/2)}; recovers the partial sums
// sum_{n <= z} a_n chi(n) / sqrt(n) of the critical-line polynomial.
inline PerronResult perron_truncated(const CoeffSequence& coeffs,
                                     const DirichletCharacter& chi, double z, double T0) {
    if (!(z > 0.0) || !(T0 > 0.0))
        throw std::invalid_argument("perron_truncated: need z > 0, T0 > 0");
    std::vector<double> logs;
    std::vector<cplx> b;  // a_n chi(n) / sqrt(n)
    for (std::uint64_t n = 1; n <= coeffs.max_n(); ++n) {
        cplx a = coeffs.at(n);
        if (a == cplx(0.0, 0.0)) continue;
        cplx c = chi.eval(n);
        if (c == cplx(0.0, 0.0)) continue;
        b.push_back(a * c / std::sqrt(static_cast<double>(n)));
        logs.push_back(std::log(static_cast<double>(n)));
    }
    PerronResult out;
    double lz = std::log(z);
    if (!b.empty()) {
        double maxrate = std::abs(lz);
        for (double ln : logs) maxrate = std::max(maxrate, std::abs(lz - ln));
        auto f = [&](double u) -> cplx {
            cplx s(0.5, u);
            CompensatedComplexSum F;
            for (std::size_t i = 0; i < b.size(); ++i)  // b_n n^{-s}
                F.add(b[i] * std::polar(std::exp(-0.5 * logs[i]), -u * logs[i]));
            return F.value() * std::exp(s * lz) / s;
        };
        double width = std::min(1.0, 4.0 / std::max(1.0, maxrate));
        auto panels = static_cast<std::size_t>(std::ceil(2.0 * T0 / width));
        CompensatedComplexSum total;
        for (std::size_t k = 0; k < panels; ++k) {
            double a = -T0 + 2.0 * T0 * static_cast<double>(k) / panels;
            double bb = -T0 + 2.0 * T0 * static_cast<double>(k + 1) / panels;
            total.add(integrate_complex(f, a, bb, 1e-10 / static_cast<double>(panels)));
        }
        out.value = total.value() / (2.0 * std::numbers::pi);
    }
    // standard truncation estimate per coefficient
    double err = 0.0;
    std::size_t i = 0;
    for (std::uint64_t n = 1; n <= coeffs.max_n(); ++n) {
        cplx a = coeffs.at(n);
        if (a == cplx(0.0, 0.0)) continue;
        cplx c = chi.eval(n);
        if (c != cplx(0.0, 0.0)) {
            double ratio = z / static_cast<double>(n);
            double mag = std::abs(b[i]) * std::sqrt(ratio);
            double dl = std::abs(std::log(ratio));
            err += mag * std::min(1.0, 1.0 / (T0 * std::max(dl, 1e-300)));
            ++i;
        }
    }
    out.truncation_error = err;
    return out;
}

}  // namespace saps
