#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "saps/characters.hpp"
#include "saps/coeffs.hpp"
#include "saps/numeric.hpp"

namespace saps {

enum class PolyNorm {
    half_line,     // sum a_n chi(n) n^{-1/2-it}
    unnormalized,  // sum a_n chi(n) n^{-it}
};

inline cplx poly_eval(const CoeffSequence& coeffs, const DirichletCharacter& chi,
                      double t, PolyNorm norm = PolyNorm::half_line) {
    CompensatedComplexSum s;
    for (std::uint64_t n = 1; n <= coeffs.max_n(); ++n) {
        cplx a = coeffs.at(n);
        if (a == cplx(0.0, 0.0)) continue;
        cplx c = chi.eval(n);
        if (c == cplx(0.0, 0.0)) continue;
        double ln = std::log(static_cast<double>(n));
        double mag = norm == PolyNorm::half_line ? 1.0 / std::sqrt(static_cast<double>(n))
                                                 : 1.0;
        s.add(a * c * std::polar(mag, -t * ln));
    }
    return s.value();
}

// polynomial values on the uniform grid t0 + k*step, k < count, by per-term
// rotation recurrence
inline std::vector<cplx> poly_eval_grid(const CoeffSequence& coeffs,
                                        const DirichletCharacter& chi, double t0,
                                        double step, std::size_t count,
                                        PolyNorm norm = PolyNorm::half_line) {
    std::vector<cplx> out(count, cplx{0.0, 0.0});
    for (std::uint64_t n = 1; n <= coeffs.max_n(); ++n) {
        cplx a = coeffs.at(n);
        if (a == cplx(0.0, 0.0)) continue;
        cplx c = chi.eval(n);
        if (c == cplx(0.0, 0.0)) continue;
        double ln = std::log(static_cast<double>(n));
        double mag = norm == PolyNorm::half_line ? 1.0 / std::sqrt(static_cast<double>(n))
                                                 : 1.0;
        cplx cur = a * c * std::polar(mag, -t0 * ln);
        cplx rot = std::polar(1.0, -step * ln);
        for (std::size_t k = 0; k < count; ++k) {
            out[k] += cur;
            cur *= rot;
        }
    }
    return out;
}

struct MeanValueResult {
    double lhs = 0.0;        // sum_q sum*_chi int_{-T}^{T} |A(it, chi)|^2 dt
    double ratio = 0.0;      // lhs / ((Q^2 T + N) sum |a_n|^2)
    std::size_t characters = 0;
};

// Hybrid mean value over primitive characters of all moduli q <= Q, with the
// unnormalized polynomial sum a_n chi(n) n^{-it}.  Trapezoid quadrature; the
// integrand has bandwidth 2 log N, so a step of pi / (8 log 2N) oversamples
// about fourfold.
inline MeanValueResult mean_value_ratio(const CoeffSequence& coeffs, std::uint64_t Q,
                                        double T) {
    if (Q < 1 || !(T >= 1.0))
        throw std::invalid_argument("mean_value_ratio: need Q >= 1, T >= 1");
    double N = static_cast<double>(coeffs.max_n());
    double step = std::min(0.05, std::numbers::pi / (8.0 * std::log(2.0 * N)));
    auto count = static_cast<std::size_t>(std::ceil(2.0 * T / step)) + 1;
    step = 2.0 * T / static_cast<double>(count - 1);

    MeanValueResult res;
    CompensatedSum lhs;
    for (std::uint64_t q = 1; q <= Q; ++q) {
        for (const auto& chi : enumerate_characters(q)) {
            if (!chi.is_primitive()) continue;
            ++res.characters;
            auto vals =
                poly_eval_grid(coeffs, chi, -T, step, count, PolyNorm::unnormalized);
            CompensatedSum integral;
            for (std::size_t k = 0; k < count; ++k) {
                double w = (k == 0 || k + 1 == count) ? 0.5 : 1.0;
                integral.add(w * std::norm(vals[k]));
            }
            lhs.add(step * integral.value());
        }
    }
    res.lhs = lhs.value();
    double qq = static_cast<double>(Q) * static_cast<double>(Q);
    res.ratio = res.lhs / ((qq * T + N) * coeffs.sum_abs_squares());
    return res;
}

// ---------------------------------------------------------------------------
// large-value extraction

struct LargeValuePoint {
    std::uint64_t q = 0;
    std::uint64_t label = 0;
    double t = 0.0;
    double magnitude = 0.0;            // |F(1/2+it)| = prod_j |F_j|
    std::vector<double> factor_mags;   // |F_j(1/2+it)| per factor
};

struct LargeValueSet {
    std::vector<LargeValuePoint> points;
    std::vector<double> thresholds;  // U_j
    double T = 0.0;

    // same-character ordinates must differ by at least 1
    bool well_spaced() const {
        std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<double>> per;
        for (const auto& p : points) per[{p.q, p.label}].push_back(p.t);
        for (auto& [key, ts] : per) {
            std::sort(ts.begin(), ts.end());
            for (std::size_t i = 1; i < ts.size(); ++i)
                if (ts[i] - ts[i - 1] < 1.0 - 1e-12) return false;
        }
        return true;
    }
};

namespace detail {

struct UnitInterval {
    long n;
    double best_t;
    double best_mag;
};

}  // namespace detail

// Scans t over [-2T, 2T) at grid_step resolution; a point belongs to the
// candidate set when U_j <= |F_j(1/2+it, chi)| + 1 <= 2 U_j for every factor.
// One representative (largest |F|) is kept per unit interval [n, n+1), and
// the representatives are split by the parity of their interval index into
// two well-spaced sets.  Boundary crossings get one extra refinement pass at
// half and quarter steps.
inline std::pair<LargeValueSet, LargeValueSet> extract_large_values(
    const std::vector<CoeffSequence>& factor_polys,
    const std::vector<DirichletCharacter>& characters, double T,
    const std::vector<double>& U, double grid_step = 0.1) {
    if (characters.empty())
        throw std::invalid_argument("extract_large_values: empty character family");
    if (factor_polys.size() != U.size())
        throw std::invalid_argument("extract_large_values: one threshold per factor");
    if (!(grid_step > 0.0) || grid_step > 0.25)
        throw std::invalid_argument("extract_large_values: need 0 < grid_step <= 1/4");
    if (!(T >= 0.5)) throw std::invalid_argument("extract_large_values: need T >= 1/2");

    LargeValueSet r0, r1;
    r0.thresholds = r1.thresholds = U;
    r0.T = r1.T = T;

    auto count = static_cast<std::size_t>(std::llround(4.0 * T / grid_step));
    double t0 = -2.0 * T;

    for (const auto& chi : characters) {
        // factor magnitudes on the grid
        std::vector<std::vector<cplx>> vals;
        vals.reserve(factor_polys.size());
        for (const auto& poly : factor_polys)
            vals.push_back(poly_eval_grid(poly, chi, t0, grid_step, count));

        auto member_grid = [&](std::size_t k) {
            for (std::size_t j = 0; j < U.size(); ++j) {
                double m = std::abs(vals[j][k]) + 1.0;
                if (m < U[j] || m > 2.0 * U[j]) return false;
            }
            return true;
        };
        auto member_at = [&](double t, double* mag_out) {
            double prod = 1.0;
            for (std::size_t j = 0; j < U.size(); ++j) {
                double m = std::abs(poly_eval(factor_polys[j], chi, t)) + 1.0;
                if (m < U[j] || m > 2.0 * U[j]) return false;
                prod *= m - 1.0;
            }
            if (mag_out) *mag_out = prod;
            return true;
        };

        std::map<long, detail::UnitInterval> intervals;
        auto offer = [&](double t, double mag) {
            long n = static_cast<long>(std::floor(t));
            auto it = intervals.find(n);
            if (it == intervals.end())
                intervals.emplace(n, detail::UnitInterval{n, t, mag});
            else if (mag > it->second.best_mag) {
                it->second.best_t = t;
                it->second.best_mag = mag;
            }
        };

        std::vector<char> member(count);
        for (std::size_t k = 0; k < count; ++k) {
            member[k] = member_grid(k) ? 1 : 0;
            if (member[k]) {
                double prod = 1.0;
                for (std::size_t j = 0; j < U.size(); ++j) prod *= std::abs(vals[j][k]);
                offer(t0 + static_cast<double>(k) * grid_step, prod);
            }
        }
        // refinement near membership flips
        for (std::size_t k = 0; k + 1 < count; ++k) {
            if (member[k] == member[k + 1]) continue;
            double base = t0 + static_cast<double>(k) * grid_step;
            for (double frac : {0.5, 0.25, 0.75}) {
                double t = base + frac * grid_step;
                double mag = 0.0;
                if (member_at(t, &mag)) offer(t, mag);
            }
        }

        // alternate interval indices into the two output sets
        std::size_t idx = 0;
        for (const auto& [n, rec] : intervals) {
            LargeValuePoint p{chi.modulus(), chi.label(), rec.best_t, rec.best_mag, {}};
            p.factor_mags.reserve(factor_polys.size());
            for (const auto& poly : factor_polys)
                p.factor_mags.push_back(std::abs(poly_eval(poly, chi, rec.best_t)));
            (idx % 2 == 0 ? r0 : r1).points.push_back(std::move(p));
            ++idx;
        }
    }

    if (!r0.well_spaced() || !r1.well_spaced())
        throw std::logic_error("extract_large_values: output sets not well-spaced");
    return {std::move(r0), std::move(r1)};
}

// empirical ratio of a well-spaced set size against the large-value bound
// min{(N+H)/U^2, N/U^2 + N H / U^6} (log 2N)^{3 m^2 + 6 r + 18}
inline double large_value_bound_check(std::size_t set_size, double N, double H, double U,
                                      unsigned m, unsigned r) {
    if (!(U >= 1.0)) throw std::invalid_argument("large_value_bound_check: need U >= 1");
    if (!(N >= 1.0) || !(H > 0.0))
        throw std::invalid_argument("large_value_bound_check: need N >= 1, H > 0");
    double u2 = U * U;
    double u6 = u2 * u2 * u2;
    double envelope = std::min((N + H) / u2, N / u2 + N * H / u6);
    double logpow = std::pow(std::log(2.0 * N),
                             static_cast<double>(3 * m * m + 6 * r + 18));
    return static_cast<double>(set_size) / (envelope * logpow);
}

// all primitive characters with modulus in (Dlo, Dhi]
inline std::vector<DirichletCharacter> primitive_family(std::uint64_t Dlo,
                                                        std::uint64_t Dhi) {
    std::vector<DirichletCharacter> out;
    for (std::uint64_t q = Dlo + 1; q <= Dhi; ++q)
        for (auto& chi : primitive_characters(q)) out.push_back(chi);
    return out;
}

}  // namespace saps
