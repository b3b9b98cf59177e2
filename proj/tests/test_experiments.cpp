#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "saps/experiments.hpp"

using namespace saps;
using Catch::Approx;

TEST_CASE("alpha profile matches the piecewise definition") {
    CHECK(alpha_profile(1.0) == Approx(0.0));
    CHECK(alpha_profile(0.7) == Approx(0.1));
    CHECK(alpha_profile(0.625) == Approx(0.125));
    CHECK(alpha_profile(0.58) == Approx(0.125));
    CHECK(alpha_profile(13.0 / 24.0) == Approx(0.125));
    CHECK(alpha_profile(0.52) == Approx(2.0 / 3.0 - 0.52));
    CHECK(alpha_profile(0.5) == Approx(1.0 / 6.0));
    CHECK(alpha_profile(0.3) == Approx(1.0 / 6.0));
}

TEST_CASE("experiment config derived quantities") {
    ExperimentConfig cfg;
    cfg.x = 1e6;
    cfg.theta = 0.5;
    cfg.A = 1.0;
    double h = cfg.resolved_h();
    CHECK(h == Approx(1000.0));
    // eta * x * log^{A+1} x = h holds by construction
    CHECK(cfg.eta() * cfg.x * std::pow(std::log(cfg.x), cfg.A + 1.0) ==
          Approx(h).epsilon(1e-12));
    CHECK(cfg.alpha() == Approx(1.0 / 6.0));

    ExperimentConfig bare;
    bare.h = 0.0;
    bare.theta = 0.0;
    CHECK_THROWS_AS(bare.resolved_h(), std::invalid_argument);
}

TEST_CASE("error terms: single-residue and degenerate cases") {
    SieveContext ctx(1 << 16);

    // q = 1: E = |theta(y,h) - h|, E' = E'' = 0
    double y = 5000.0, h = 120.0;
    double theta = ctx.theta_short(y, h, 1, 0);
    CHECK(error_term(ctx, y, h, 1) == std::abs(theta - h));
    CHECK(error_term_prime(ctx, y, h, 1) == 0.0);
    CHECK(error_term_lambda(ctx, y, h, 1) == 0.0);

    // empty window: E = h / phi(q) exactly
    CHECK(error_term(ctx, 1e6, 0.25, 7) == 0.25 / 6.0);

    // q prime, larger than the window top: the coprimality condition in the
    // E' reference sum is vacuous, so the reference is theta(y,h)/phi(q)
    double yq = 100.0, hq = 40.0;
    double full = ctx.theta_short(yq, hq, 1, 0);
    double worst = 0.0;
    for (std::uint64_t a = 0; a < 149; ++a) {
        worst = std::max(worst,
                         std::abs(ctx.theta_short(yq, hq, 149, a) - full / 148.0));
    }
    CHECK(error_term_prime(ctx, yq, hq, 149) == Approx(worst).margin(1e-12));
    // and E - E' differs by at most the reference shift |h - theta| / phi(q)
    CHECK(std::abs(error_term(ctx, yq, hq, 149) - error_term_prime(ctx, yq, hq, 149)) <=
          std::abs(hq - full) / 148.0 + 1e-12);

    CHECK_THROWS_AS(error_term(ctx, 10.0, -1.0, 3), std::invalid_argument);
}

TEST_CASE("error terms equal the brute-force oracle bit for bit") {
    SieveContext ctx(1 << 16);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ypick(10.0, 30000.0);
    std::uniform_real_distribution<double> hpick(5.0, 800.0);
    std::uniform_int_distribution<std::uint64_t> qpick(1, 24);
    for (int trial = 0; trial < 60; ++trial) {
        double y = ypick(rng), h = hpick(rng);
        std::uint64_t q = qpick(rng);
        CAPTURE(y, h, q);
        REQUIRE(error_term(ctx, y, h, q) == bruteforce::error_term(y, h, q));
        REQUIRE(error_term_prime(ctx, y, h, q) == bruteforce::error_term_prime(y, h, q));
        REQUIRE(std::abs(error_term_lambda(ctx, y, h, q) -
                         bruteforce::error_term_lambda(y, h, q)) <= 1e-9);
    }

    // |E' - E''| is bounded by the prime-power mass in the window
    double y = 1e4, h = 1e3;
    double pp = ctx.psi_short(y, h, 1, 0) - ctx.theta_short(y, h, 1, 0);
    CHECK(std::abs(error_term_prime(ctx, y, h, 3) - error_term_lambda(ctx, y, h, 3)) <=
          pp + 1e-12);
}

TEST_CASE("averaged error: sampled estimate with per-sample oracle equality") {
    SieveContext ctx(1 << 18);
    ExperimentConfig cfg;
    cfg.x = 20000.0;
    cfg.h = 500.0;
    cfg.Q = 8;
    cfg.samples = 24;
    cfg.strata = 8;
    cfg.seed = 42;

    ErrorReport rep = averaged_error(ctx, cfg, ErrorKind::E);
    CHECK(rep.oracle_mismatches == 0);
    CHECK(rep.rows.size() == cfg.samples * cfg.Q);
    CHECK(rep.estimate > 0.0);
    CHECK(rep.sampling_error >= 0.0);
    CHECK(std::isfinite(rep.normalized));

    // determinism: same seed, same rows
    ErrorReport rep2 = averaged_error(ctx, cfg, ErrorKind::E);
    REQUIRE(rep2.rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        REQUIRE(rep2.rows[i].y == rep.rows[i].y);
        REQUIRE(rep2.rows[i].value == rep.rows[i].value);
    }

    ErrorReport repl = averaged_error(ctx, cfg, ErrorKind::Elambda);
    CHECK(repl.oracle_mismatches == 0);

    cfg.samples = 0;
    CHECK_THROWS_AS(averaged_error(ctx, cfg, ErrorKind::E), std::invalid_argument);
}

TEST_CASE("monotonicity of the Q-sum") {
    SieveContext ctx(1 << 16);
    double y = 7777.0, h = 333.0;
    CompensatedSum acc;
    double prev = 0.0;
    for (std::uint64_t Q = 1; Q <= 20; ++Q) {
        acc.add(error_term(ctx, y, h, Q));
        CHECK(acc.value() >= prev - 1e-12);
        prev = acc.value();
    }
}

TEST_CASE("exact averaged error agrees with a breakpoint oracle") {
    SieveContext ctx(1 << 16);
    const double x = 1000.0, h = 50.0;
    const std::uint64_t Q = 5;

    double exact = averaged_error_exact(ctx, x, h, Q, ErrorKind::E);

    // oracle: collect all breakpoints p and p-h, integrate the piecewise
    // constant integrand via midpoints and brute-force error terms
    std::vector<double> cuts{x, 2.0 * x};
    for (std::uint64_t n = 2; static_cast<double>(n) <= 2.0 * x + h; ++n) {
        if (!bruteforce::is_prime(n)) continue;
        double pn = static_cast<double>(n);
        if (pn - h > x && pn - h < 2.0 * x) cuts.push_back(pn - h);
        if (pn > x && pn < 2.0 * x) cuts.push_back(pn);
    }
    std::sort(cuts.begin(), cuts.end());
    CompensatedSum integral;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        CompensatedSum val;
        for (std::uint64_t q = 1; q <= Q; ++q)
            val.add(bruteforce::error_term(mid, h, q));
        integral.add((cuts[i + 1] - cuts[i]) * val.value());
    }
    double oracle = integral.value() / (h * x);
    CHECK(exact == Approx(oracle).epsilon(1e-9));

    CHECK_THROWS_AS(averaged_error_exact(ctx, 2e6, 100.0, 3, ErrorKind::E),
                    std::invalid_argument);
}

TEST_CASE("dyadic covering inequality") {
    SieveContext ctx(1 << 18);

    // h <= eta y: a single block
    auto one = dyadic_cover_check(ctx, 10000.0, 50.0, 7, 0.01);
    CHECK(one.blocks == 1);
    CHECK(one.lhs <= one.rhs + 1e-12);

    auto big = dyadic_cover_check(ctx, 1e5, 1e4, 7, 1e-3);
    CHECK(big.lhs <= big.rhs + 1e-12);
    CHECK(big.blocks >= 90);

    // eta >= h/y degenerates to one block
    auto degen = dyadic_cover_check(ctx, 5000.0, 100.0, 3, 0.05);
    CHECK(degen.blocks == 1);
    CHECK(degen.lhs <= degen.rhs + 1e-12);

    // randomized configurations
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ypick(500.0, 20000.0);
    std::uniform_real_distribution<double> hfrac(0.01, 0.5);
    std::uniform_real_distribution<double> epick(0.001, 0.2);
    std::uniform_int_distribution<std::uint64_t> qpick(1, 12);
    for (int trial = 0; trial < 50; ++trial) {
        double y = ypick(rng);
        double h = y * hfrac(rng);
        double eta = epick(rng);
        std::uint64_t q = qpick(rng);
        CAPTURE(y, h, eta, q);
        auto r = dyadic_cover_check(ctx, y, h, q, eta);
        REQUIRE(r.lhs <= r.rhs + 1e-9);
    }

    CHECK_THROWS_AS(dyadic_cover_check(ctx, 100.0, 10.0, 3, 0.0), std::invalid_argument);
}

TEST_CASE("theorem-3 pair fraction") {
    SieveContext ctx(1 << 16);

    // Q = 1 with h wide enough that every window holds a prime
    ExperimentConfig cfg;
    cfg.x = 2000.0;
    cfg.h = 200.0;
    cfg.Q = 1;
    cfg.samples = 100;
    cfg.seed = 5;
    auto rep = theorem3_pair_fraction(ctx, cfg, 0.01);
    CHECK(rep.oracle_mismatches == 0);
    CHECK(rep.fraction == 1.0);

    // c -> infinity gives fraction 0
    auto repinf = theorem3_pair_fraction(ctx, cfg, 1e9);
    CHECK(repinf.fraction == 0.0);

    // mixed moduli still match the oracle pair by pair
    cfg.Q = 4;
    cfg.samples = 60;
    auto repq = theorem3_pair_fraction(ctx, cfg, 0.1);
    CHECK(repq.oracle_mismatches == 0);
    CHECK(repq.pair_thresholds.size() == 60);

    CHECK_THROWS_AS(theorem3_pair_fraction(ctx, cfg, 0.0), std::invalid_argument);
}

TEST_CASE("smk counting") {
    // every ((sqrt(k)-1)^2, (sqrt(k)+1)^2) window holds a prime at this scale
    CHECK(smk_count(1, 100) == 100);
    CHECK(smk_count(1, 100) == bruteforce::smk_count(1, 100));

    CHECK(smk_count(5, 40) == bruteforce::smk_count(5, 40));
    CHECK(smk_count(12, 75) == bruteforce::smk_count(12, 75));

    // never exceeds M*K
    CHECK(smk_count(7, 30) <= 7 * 30);

    CHECK_THROWS_AS(smk_count(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(smk_count(100000, 100000), std::invalid_argument);
}
