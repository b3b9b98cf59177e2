#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "saps/numeric.hpp"
#include "saps/sieve.hpp"

namespace saps {

// Theorem-2 window exponent profile alpha(theta)
inline double alpha_profile(double theta) {
    if (theta >= 5.0 / 8.0) return (1.0 - theta) / 3.0;
    if (theta >= 13.0 / 24.0) return 1.0 / 8.0;
    if (theta >= 0.5) return 2.0 / 3.0 - theta;
    return 1.0 / 6.0;
}

struct ExperimentConfig {
    double x = 1e6;
    double theta = 0.0;  // used when h == 0
    double h = 0.0;      // explicit window length, wins over theta
    std::uint64_t Q = 30;
    double A = 1.0;
    double epsilon = 0.05;
    std::uint64_t samples = 200;
    std::uint64_t strata = 256;
    std::uint64_t seed = 1;

    double resolved_h() const {
        if (h > 0.0) return h;
        if (theta > 0.0) return std::pow(x, theta);
        throw std::invalid_argument("experiment config: set h or theta");
    }
    double resolved_theta() const {
        return h > 0.0 ? std::log(h) / std::log(x) : theta;
    }
    double eta() const {  // h / (x log^{A+1} x)
        return resolved_h() / (x * std::pow(std::log(x), A + 1.0));
    }
    double alpha() const { return alpha_profile(resolved_theta()); }
    // Q^2 <= h / x^{alpha + epsilon}
    bool hypothesis_ok() const {
        double lim = resolved_h() / std::pow(x, alpha() + epsilon);
        return static_cast<double>(Q) * static_cast<double>(Q) <= lim;
    }
};

enum class ErrorKind { E, Eprime, Elambda };

namespace detail {

// shared reduction from per-residue sums to the error value; identical in
// the sieve-backed and brute-force paths so equal inputs give equal bits
inline double reduce_error(const std::vector<CompensatedSum>& per_residue,
                           const CompensatedSum& coprime_total, double h,
                           std::uint64_t q, std::uint64_t phi, ErrorKind kind) {
    double reference = kind == ErrorKind::E
                           ? h / static_cast<double>(phi)
                           : coprime_total.value() / static_cast<double>(phi);
    double worst = 0.0;
    for (std::uint64_t a = 0; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        worst = std::max(worst, std::abs(per_residue[a].value() - reference));
    }
    return worst;
}

inline std::uint64_t phi_by_count(std::uint64_t q) {
    std::uint64_t c = 0;
    for (std::uint64_t a = 0; a < q; ++a)
        if (std::gcd(a, q) == 1) ++c;
    return c;
}

}  // namespace detail

// sieve-backed E / E' / E'' at a single modulus
inline double error_term_kind(SieveContext& ctx, double y, double h, std::uint64_t q,
                              ErrorKind kind) {
    if (q < 1 || !(h > 0.0))
        throw std::invalid_argument("error_term: need q >= 1, h > 0");
    std::vector<CompensatedSum> per(q);
    CompensatedSum coprime;
    ctx.for_window(y, h, [&](const SieveSegment& seg, std::uint64_t n) {
        double w;
        if (kind == ErrorKind::Elambda) {
            w = seg.lambda_at(n);
        } else {
            w = seg.is_prime(n) ? std::log(static_cast<double>(n)) : 0.0;
        }
        if (w <= 0.0) return;
        per[n % q].add(w);
        if (std::gcd(n, q) == 1) coprime.add(w);
    });
    return detail::reduce_error(per, coprime, h, q, euler_phi(q), kind);
}

inline double error_term(SieveContext& ctx, double y, double h, std::uint64_t q) {
    return error_term_kind(ctx, y, h, q, ErrorKind::E);
}
inline double error_term_prime(SieveContext& ctx, double y, double h, std::uint64_t q) {
    return error_term_kind(ctx, y, h, q, ErrorKind::Eprime);
}
inline double error_term_lambda(SieveContext& ctx, double y, double h, std::uint64_t q) {
    return error_term_kind(ctx, y, h, q, ErrorKind::Elambda);
}

// Independent oracle path: trial division only, no shared interval logic
// with the sieve tables.
namespace bruteforce {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

// log p when n = p^k, else 0
inline double lambda(std::uint64_t n) {
    if (n < 2) return 0.0;
    std::uint64_t m = n, p = 0;
    for (std::uint64_t d = 2; d * d <= m; ++d) {
        if (m % d == 0) {
            p = d;
            while (m % d == 0) m /= d;
            break;
        }
    }
    if (p == 0) return std::log(static_cast<double>(n));
    return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

inline double error_term_kind(double y, double h, std::uint64_t q, ErrorKind kind) {
    if (q < 1 || !(h > 0.0))
        throw std::invalid_argument("error_term: need q >= 1, h > 0");
    std::vector<CompensatedSum> per(q);
    CompensatedSum coprime;
    for (std::uint64_t n = std::max<std::uint64_t>(
             2, static_cast<std::uint64_t>(std::floor(y)) + 1);
         static_cast<double>(n) <= y + h; ++n) {
        if (static_cast<double>(n) <= y) continue;
        double w;
        if (kind == ErrorKind::Elambda) {
            w = lambda(n);
        } else {
            w = is_prime(n) ? std::log(static_cast<double>(n)) : 0.0;
        }
        if (w <= 0.0) continue;
        per[n % q].add(w);
        if (std::gcd(n, q) == 1) coprime.add(w);
    }
    return detail::reduce_error(per, coprime, h, q, detail::phi_by_count(q), kind);
}

inline double error_term(double y, double h, std::uint64_t q) {
    return error_term_kind(y, h, q, ErrorKind::E);
}
inline double error_term_prime(double y, double h, std::uint64_t q) {
    return error_term_kind(y, h, q, ErrorKind::Eprime);
}
inline double error_term_lambda(double y, double h, std::uint64_t q) {
    return error_term_kind(y, h, q, ErrorKind::Elambda);
}

}  // namespace bruteforce

inline bool oracle_matches(double main_value, double oracle_value, ErrorKind kind) {
    if (kind == ErrorKind::Elambda)
        return std::abs(main_value - oracle_value) <= 1e-9;
    return main_value == oracle_value;
}

// ---------------------------------------------------------------------------
// averaged error experiment

struct SampleRow {
    double y = 0.0;
    std::uint64_t q = 0;
    double value = 0.0;
};

struct ErrorReport {
    ExperimentConfig config;
    ErrorKind kind = ErrorKind::E;
    std::vector<SampleRow> rows;
    double estimate = 0.0;        // (1/(hx)) int_x^{2x} sum_q E dy, sampled
    double sampling_error = 0.0;  // standard error of the estimate
    double normalized = 0.0;      // estimate relative to h-mass, sum_q / (h Q)
    std::size_t oracle_mismatches = 0;
    bool hypothesis_ok = true;
    double eta = 0.0;
};

// stratified uniform sampling of (1/(hx)) int_x^{2x} sum_{q<=Q} E(y,h;q) dy,
// with every sampled summand checked against the brute-force oracle
inline ErrorReport averaged_error(SieveContext& ctx, const ExperimentConfig& cfg,
                                  ErrorKind kind) {
    if (cfg.samples == 0)
        throw std::invalid_argument("averaged_error: need at least one sample");
    double h = cfg.resolved_h();
    ErrorReport rep;
    rep.config = cfg;
    rep.kind = kind;
    rep.hypothesis_ok = cfg.hypothesis_ok();
    rep.eta = cfg.eta();

    std::uint64_t S = std::max<std::uint64_t>(1, std::min(cfg.strata, cfg.samples));
    std::vector<double> totals(cfg.samples, 0.0);
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        std::uint64_t s = i % S;
        std::mt19937_64 rng(splitmix64(splitmix64(cfg.seed) + i));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double y = cfg.x * (1.0 + (static_cast<double>(s) + unif(rng)) /
                                      static_cast<double>(S));
        CompensatedSum total;
        for (std::uint64_t q = 1; q <= cfg.Q; ++q) {
            double main = error_term_kind(ctx, y, h, q, kind);
            double oracle = bruteforce::error_term_kind(y, h, q, kind);
            if (!oracle_matches(main, oracle, kind)) ++rep.oracle_mismatches;
            rep.rows.push_back({y, q, main});
            total.add(main);
        }
        totals[i] = total.value();
    }
    double mean = 0.0;
    for (double v : totals) mean += v;
    mean /= static_cast<double>(cfg.samples);
    double var = 0.0;
    for (double v : totals) var += (v - mean) * (v - mean);
    var /= std::max<double>(1.0, static_cast<double>(cfg.samples - 1));

    rep.estimate = mean / h;  // (1/(hx)) * x * mean
    rep.sampling_error = std::sqrt(var / static_cast<double>(cfg.samples)) / h;
    rep.normalized = mean / (h * static_cast<double>(cfg.Q));
    return rep;
}

// Exact event-driven integral (1/(hx)) int_x^{2x} sum_q E dy for x <= 1e6.
// The integrand is piecewise constant between weight-carrying points
// entering (y = p - h) and leaving (y = p) the window.
inline double averaged_error_exact(SieveContext& ctx, double x, double h,
                                   std::uint64_t Q, ErrorKind kind) {
    if (!(x <= 1e6))
        throw std::invalid_argument("averaged_error_exact: x capped at 1e6");
    if (!(h > 0.0) || Q < 1)
        throw std::invalid_argument("averaged_error_exact: need h > 0, Q >= 1");

    struct Event {
        double y;
        std::uint64_t n;
        double weight;  // +w enter, -w leave
    };
    std::vector<Event> events;

    auto weight_of = [&](const SieveSegment& seg, std::uint64_t n) {
        if (kind == ErrorKind::Elambda) return seg.lambda_at(n);
        return seg.is_prime(n) ? std::log(static_cast<double>(n)) : 0.0;
    };

    // points relevant anywhere in windows (y, y+h], y in [x, 2x]
    ctx.for_window(x, x + x + h, [&](const SieveSegment& seg, std::uint64_t n) {
        double w = weight_of(seg, n);
        if (w <= 0.0) return;
        double enter = static_cast<double>(n) - h;
        double leave = static_cast<double>(n);
        events.push_back({std::max(enter, x), n, w});
        events.push_back({std::min(leave, 2.0 * x), n, -w});
    });
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.y < b.y; });

    // state: per q, per residue sums and coprime totals
    std::vector<std::vector<double>> per(Q + 1);
    std::vector<double> cop(Q + 1, 0.0);
    std::vector<std::uint64_t> phi(Q + 1, 1);
    for (std::uint64_t q = 1; q <= Q; ++q) {
        per[q].assign(q, 0.0);
        phi[q] = euler_phi(q);
    }
    auto apply = [&](std::uint64_t n, double w) {
        for (std::uint64_t q = 1; q <= Q; ++q) {
            per[q][n % q] += w;
            if (std::gcd(n, q) == 1) cop[q] += w;
        }
    };
    // initial window (x, x+h]
    ctx.for_window(x, h, [&](const SieveSegment& seg, std::uint64_t n) {
        double w = weight_of(seg, n);
        if (w > 0.0) apply(n, w);
    });

    auto integrand = [&]() {
        double total = 0.0;
        for (std::uint64_t q = 1; q <= Q; ++q) {
            double reference = kind == ErrorKind::E
                                   ? h / static_cast<double>(phi[q])
                                   : cop[q] / static_cast<double>(phi[q]);
            double worst = 0.0;
            for (std::uint64_t a = 0; a < q; ++a) {
                if (std::gcd(a, q) != 1) continue;
                worst = std::max(worst, std::abs(per[q][a] - reference));
            }
            total += worst;
        }
        return total;
    };

    double ycur = x;
    CompensatedSum integral;
    std::size_t i = 0;
    while (i < events.size() && events[i].y <= x) {
        // events at the left edge only adjust state when they are "enter"
        // events for points already counted by the initial window; skip them
        ++i;
    }
    while (i < events.size()) {
        double ynext = std::min(events[i].y, 2.0 * x);
        if (ynext > ycur) {
            integral.add((ynext - ycur) * integrand());
            ycur = ynext;
        }
        while (i < events.size() && events[i].y == ynext) {
            apply(events[i].n, events[i].weight);
            ++i;
        }
        if (ycur >= 2.0 * x) break;
    }
    if (ycur < 2.0 * x) integral.add((2.0 * x - ycur) * integrand());
    return integral.value() / (h * x);
}

// ---------------------------------------------------------------------------
// dyadic covering of (y, y+h] by blocks (y_j, y_j (1+eta)]

struct DyadicCover {
    double lhs = 0.0;       // E'(y, h; q)
    double rhs = 0.0;       // sum of block errors plus the boundary term
    double boundary = 0.0;  // log-weighted primes in the straddling overhang
    std::size_t blocks = 0;
};

inline DyadicCover dyadic_cover_check(SieveContext& ctx, double y, double h,
                                      std::uint64_t q, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("dyadic_cover_check: need eta > 0");
    DyadicCover out;
    out.lhs = error_term_prime(ctx, y, h, q);

    CompensatedSum rhs;
    double yj = y;
    double top = y + h;
    while (yj < top) {
        rhs.add(error_term_prime(ctx, yj, eta * yj, q));
        ++out.blocks;
        double ynext = yj * (1.0 + eta);
        if (ynext > top) {
            // overhang (y+h, yj (1+eta)]: the final block overshoots; its
            // surplus mass bounds the truncation error of the cover
            std::vector<CompensatedSum> per(q);
            CompensatedSum cop;
            ctx.for_window(top, ynext - top, [&](const SieveSegment& seg, std::uint64_t n) {
                if (!seg.is_prime(n)) return;
                double w = std::log(static_cast<double>(n));
                per[n % q].add(w);
                if (std::gcd(n, q) == 1) cop.add(w);
            });
            double worst = 0.0;
            for (std::uint64_t a = 0; a < q; ++a) {
                if (std::gcd(a, q) != 1) continue;
                worst = std::max(worst, per[a].value());
            }
            out.boundary = worst + cop.value() / static_cast<double>(euler_phi(q));
        }
        yj = ynext;
    }
    rhs.add(out.boundary);
    out.rhs = rhs.value();
    return out;
}

// ---------------------------------------------------------------------------
// Theorem-3 style pair counting

struct PairFractionReport {
    double fraction = 0.0;
    std::size_t oracle_mismatches = 0;
    std::vector<double> pair_thresholds;  // per pair: max c with success
};

// fraction of sampled pairs (q <= Q, n <= x) for which every reduced
// progression has theta(n, h; q, a) >= c h / phi(q)
inline PairFractionReport theorem3_pair_fraction(SieveContext& ctx,
                                                 const ExperimentConfig& cfg, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("theorem3_pair_fraction: need c > 0");
    double h = cfg.resolved_h();
    PairFractionReport rep;
    std::size_t hits = 0;
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        std::mt19937_64 rng(splitmix64(splitmix64(cfg.seed ^ 0x7433ULL) + i));
        std::uint64_t q = 1 + rng() % cfg.Q;
        std::uint64_t n = 1 + rng() % static_cast<std::uint64_t>(cfg.x);

        // min over reduced residues of the progression mass, both paths
        auto min_mass = [&](auto&& theta_of) {
            double worst = -1.0;
            for (std::uint64_t a = 0; a < q; ++a) {
                if (std::gcd(a, q) != 1) continue;
                double v = theta_of(a);
                if (worst < 0.0 || v < worst) worst = v;
            }
            return worst;
        };
        double mmain = min_mass([&](std::uint64_t a) {
            return ctx.theta_short(static_cast<double>(n), h, q, a);
        });
        double moracle = min_mass([&](std::uint64_t a) {
            CompensatedSum s;
            for (std::uint64_t v = n + 1; static_cast<double>(v) <= n + h; ++v)
                if (v % q == a && bruteforce::is_prime(v))
                    s.add(std::log(static_cast<double>(v)));
            return s.value();
        });
        if (mmain != moracle) ++rep.oracle_mismatches;

        double phi = static_cast<double>(euler_phi(q));
        rep.pair_thresholds.push_back(mmain * phi / h);
        if (mmain >= c * h / phi) ++hits;
    }
    rep.fraction =
        static_cast<double>(hits) / static_cast<double>(std::max<std::uint64_t>(1, cfg.samples));
    return rep;
}

// ---------------------------------------------------------------------------
// S(M, K): pairs (m, k) whose Hasse interval
// (m^2 k - 2 m sqrt(k) + 1, m^2 k + 2 m sqrt(k) + 1) holds a prime = 1 mod m

inline std::uint64_t smk_count(std::uint64_t M, std::uint64_t K,
                               std::uint64_t sieve_cap = (std::uint64_t{1} << 28)) {
    if (M < 1 || K < 1) throw std::invalid_argument("smk_count: need M, K >= 1");
    std::uint64_t m2k_max = M * M * K;
    std::uint64_t span = 2 * M * (isqrt_u64(K) + 1) + 2;
    if (m2k_max > sieve_cap || m2k_max + span < m2k_max)
        throw std::invalid_argument("smk_count: range exceeds sieve cap");
    std::uint64_t limit = m2k_max + span;

    std::vector<bool> comp(limit + 1, false);
    comp[0] = true;
    if (limit >= 1) comp[1] = true;
    for (std::uint64_t i = 2; i * i <= limit; ++i)
        if (!comp[i])
            for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;

    std::uint64_t count = 0;
    for (std::uint64_t m = 1; m <= M; ++m) {
        for (std::uint64_t k = 1; k <= K; ++k) {
            std::uint64_t m2k = m * m * k;
            std::uint64_t four = 4 * m * m * k;
            std::uint64_t u = isqrt_u64(four);
            std::uint64_t c = (u * u == four) ? u : u + 1;  // ceil(2 m sqrt k)
            // open interval: p = m2k + 1 + d with |d| < 2 m sqrt(k),
            // i.e. p in [m2k + 2 - c, m2k + c]
            std::uint64_t lo = m2k + 2 - c;
            std::uint64_t hi = m2k + c;
            std::uint64_t p = lo + ((1 + m - lo % m) % m);  // first p = 1 mod m
            bool found = false;
            for (; p <= hi; p += m) {
                if (p >= 2 && !comp[p]) {
                    found = true;
                    break;
                }
            }
            if (found) ++count;
        }
    }
    return count;
}

namespace bruteforce {

// exact integer reformulation: p = m^2 k + 1 + m e qualifies iff e^2 < 4k
inline std::uint64_t smk_count(std::uint64_t M, std::uint64_t K) {
    std::uint64_t count = 0;
    for (std::uint64_t m = 1; m <= M; ++m) {
        for (std::uint64_t k = 1; k <= K; ++k) {
            bool found = false;
            auto E = static_cast<long long>(isqrt_u64(4 * k)) + 1;
            for (long long e = -E; e <= E && !found; ++e) {
                if (static_cast<std::uint64_t>(e * e) >= 4 * k) continue;
                long long p = static_cast<long long>(m * m * k) + 1 +
                              e * static_cast<long long>(m);
                if (p >= 2 && is_prime(static_cast<std::uint64_t>(p))) found = true;
            }
            if (found) ++count;
        }
    }
    return count;
}

}  // namespace bruteforce

}  // namespace saps
