#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "saps/analytic.hpp"

using namespace saps;
using Catch::Approx;

namespace {
double rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}
}  // namespace

TEST_CASE("complex gamma against frozen high-precision values") {
    CHECK(rel_err(gamma_fn(cplx(2.5, 5)),
                  cplx(0.0226736031898001376, -0.0117228440417151276)) < 1e-12);
    CHECK(rel_err(gamma_fn(cplx(-1.5, 3)),
                  cplx(-0.00209603816053931913, 0.00069222595466354387)) < 1e-12);
    CHECK(rel_err(gamma_fn(cplx(0.5, 14.134725)),
                  cplx(-1.4455538437606964e-10, -5.5227887687740656e-10)) < 1e-12);
    CHECK(rel_err(gamma_fn(cplx(1.25, 80)),
                  cplx(1.8785803859195979e-55, 1.7837411755870113e-53)) < 1e-11);
    CHECK(rel_err(gamma_fn(cplx(1, 0)), cplx(1, 0)) < 1e-14);
    CHECK(rel_err(gamma_fn(cplx(0.5, 0)), cplx(std::sqrt(std::numbers::pi), 0)) < 1e-14);

    // recurrence property
    for (cplx z : {cplx(0.3, 2.0), cplx(-0.7, 11.0), cplx(2.0, -35.0)}) {
        CHECK(rel_err(gamma_fn(z + 1.0), z * gamma_fn(z)) < 1e-12);
    }
}

TEST_CASE("gamma factor values, zeros and pole limits") {
    CHECK(std::abs(gamma_factor(cplx(1, 0), 0)) < 1e-15);
    CHECK(rel_err(gamma_factor(cplx(0.5, 0), 0), cplx(1.25331413731550025, 0)) < 1e-12);

    CHECK(rel_err(gamma_factor(cplx(2.5, 5), 0),
                  cplx(-9.97333308920069189, 31.3263255856343314)) < 1e-12);
    CHECK(rel_err(gamma_factor(cplx(0.5, 30), 0),
                  cplx(-0.67218445615363655, 1.05781112855761566)) < 1e-12);
    CHECK(rel_err(gamma_factor(cplx(-1.5, 7), 0),
                  cplx(0.01869470677977909, -0.01651776486665148)) < 1e-12);
    CHECK(rel_err(gamma_factor(cplx(1.25, 100), 0),
                  cplx(-0.66841664321474214, 39.6277909791585822)) < 1e-12);
    CHECK(rel_err(gamma_factor(cplx(2.5, 5), 1),
                  cplx(-31.3263285916299603, -9.97332364733747247)) < 1e-12);
    CHECK(rel_err(gamma_factor(cplx(-0.5, 2), 1),
                  cplx(0.60717926391032254, -0.03053648954554462)) < 1e-12);

    // cancelled poles have finite limits
    CHECK(gamma_factor(cplx(-1, 0), 0).real() ==
          Approx(-std::numbers::pi / 2).epsilon(1e-12));
    CHECK(gamma_factor(cplx(0, 0), 1).real() ==
          Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK(gamma_factor(cplx(-3, 0), 0).real() ==
          Approx(std::numbers::pi / 12).epsilon(1e-12));

    // surviving poles
    CHECK_THROWS_AS(gamma_factor(cplx(0, 0), 0), std::domain_error);
    CHECK_THROWS_AS(gamma_factor(cplx(-2, 0), 0), std::domain_error);
    CHECK_THROWS_AS(gamma_factor(cplx(-1, 0), 1), std::domain_error);
    CHECK_THROWS_AS(gamma_factor(cplx(1, 0), 2), std::invalid_argument);
}

TEST_CASE("gamma factor follows the Stirling-scale envelope") {
    // |Gamma(A+iu) cos(pi(A+iu)/2)| ~ (sqrt(2 pi)/2) u^{A-1/2} at A = 2.5
    double c = std::sqrt(2.0 * std::numbers::pi) / 2.0;
    for (double u : {5.0, 10.0, 20.0}) {
        double got = std::abs(gamma_factor(cplx(2.5, u), 0));
        CHECK(got / (c * u * u) == Approx(1.0).margin(0.08));
    }
}

TEST_CASE("hurwitz zeta against frozen high-precision values") {
    CHECK(rel_err(hurwitz_zeta(cplx(0.5, 30), 1.0 / 3.0),
                  cplx(0.92061319282774565, 1.78906125316380470)) < 1e-10);
    CHECK(rel_err(hurwitz_zeta(cplx(-2, 50), 0.7),
                  cplx(132.103562372498482, -135.542715819849921)) < 1e-10);
    CHECK(rel_err(hurwitz_zeta(cplx(3, -20), 0.01),
                  cplx(-542641.293913960835, 839964.261501813050)) < 1e-10);
    CHECK(rel_err(hurwitz_zeta(cplx(0.5, 0), 1.0),
                  cplx(-1.46035450880958681, 0)) < 1e-11);
    // edge of the accuracy box
    CHECK(rel_err(hurwitz_zeta(cplx(-1.9, 49.5), 1.0 / 97.0),
                  cplx(-6.98685744519230390, -121.487877103709303)) < 1e-10);

    CHECK_THROWS_AS(hurwitz_zeta(cplx(1, 0), 0.5), std::domain_error);
    CHECK_THROWS_AS(hurwitz_zeta(cplx(2, 0), 0.0), std::invalid_argument);
}

TEST_CASE("l_value basics") {
    auto triv = character(1, 0);
    CHECK(rel_err(l_value(cplx(2, 0), triv),
                  cplx(std::numbers::pi * std::numbers::pi / 6.0, 0)) < 1e-10);

    auto chi4 = character(4, 1);
    CHECK(rel_err(l_value(cplx(1, 0), chi4), cplx(std::numbers::pi / 4.0, 0)) < 1e-10);

    // near-pole path agrees with values just outside the pole window
    cplx a = l_value(cplx(1.0 + 5e-5, 0), chi4);
    cplx b = l_value(cplx(1.0 + 2e-4, 0), chi4);
    CHECK(std::abs(a - cplx(std::numbers::pi / 4.0, 0)) < 1e-4);
    CHECK(std::abs(b - cplx(std::numbers::pi / 4.0, 0)) < 4e-4);

    CHECK_THROWS_AS(l_value(cplx(1, 0), triv), std::domain_error);
    CHECK_THROWS_AS(l_value(cplx(1, 0), character(6, 0)), std::domain_error);
}

TEST_CASE("root numbers") {
    CHECK(rel_err(root_number(character(4, 1)), cplx(1, 0)) < 1e-12);

    // real primitive even character mod 5: tau = sqrt(5), eps = 1
    for (const auto& chi : primitive_characters(5)) {
        if (chi.parity() == 0 && std::abs(chi.eval(2) - cplx(-1, 0)) < 1e-12)
            CHECK(rel_err(root_number(chi), cplx(1, 0)) < 1e-12);
    }

    for (std::uint64_t q = 2; q <= 50; ++q)
        for (const auto& chi : primitive_characters(q))
            REQUIRE(std::abs(std::abs(root_number(chi)) - 1.0) < 1e-9);

    CHECK_THROWS_AS(root_number(character(8, 2)), std::invalid_argument);
}

TEST_CASE("functional equation residual on a sample grid") {
    for (std::uint64_t q : {3, 4, 5, 7, 8, 12}) {
        for (const auto& chi : primitive_characters(q)) {
            for (double t : {-10.0, -3.5, 0.0, 2.0, 7.5}) {
                CAPTURE(q, chi.label(), t);
                REQUIRE(functional_equation_residual(cplx(0.5, t), chi) < 1e-6);
            }
        }
    }
}

TEST_CASE("afe smoothed sum: direct oracle and binomial identity") {
    SmoothWindow w;
    auto chi = primitive_characters(5).front();

    AFEInstance inst{chi, 100.0, 0.0, 0, &w};
    cplx got = afe_smoothed_sum(inst);
    CompensatedComplexSum oracle;
    for (std::uint64_t n = 100; n <= 400; ++n)
        oracle.add(w.value(n / 100.0) * chi.eval(n) / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(got - oracle.value()) < 1e-12);

    // empty support below N = 1/4
    AFEInstance tiny{chi, 0.2, 0.0, 0, &w};
    CHECK(afe_smoothed_sum(tiny) == cplx(0.0, 0.0));

    // (log n)^r = sum_j C(r,j) (log N)^j log(n/N)^{r-j}
    AFEInstance r1{chi, 100.0, 1.5, 1, &w};
    cplx lhs = afe_smoothed_sum(r1);
    CompensatedComplexSum rhs;
    for (std::uint64_t n = 100; n <= 400; ++n) {
        double ln = std::log(n / 100.0);
        double base = w.value(n / 100.0);
        rhs.add((std::log(100.0) + ln) * base * chi.eval(n) *
                std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                           -1.5 * std::log(static_cast<double>(n))));
    }
    CHECK(std::abs(lhs - rhs.value()) < 1e-10);
}

TEST_CASE("afe transformed sum matches the smoothed sum") {
    SmoothWindow w;

    auto quad5 = primitive_characters(5).front();
    AFEInstance a{quad5, 100.0, 0.0, 0, &w};
    cplx sm = afe_smoothed_sum(a);
    AFETransformed tr = afe_transformed_sum(a);
    CAPTURE(sm.real(), sm.imag(), tr.value.real(), tr.value.imag(), tr.tail_bound);
    CHECK(std::abs(sm - tr.value) < 1e-6);
    CHECK(tr.tail_bound < 1e-6);

    auto chi3 = primitive_characters(3).front();
    AFEInstance b{chi3, 50.0, 2.0, 1, &w};
    cplx smb = afe_smoothed_sum(b);
    AFETransformed trb = afe_transformed_sum(b);
    CHECK(std::abs(smb - trb.value) < 1e-5);

    // complex character, nonzero t
    auto mod7 = primitive_characters(7);
    AFEInstance c{mod7[1], 100.0, 5.0, 0, &w};
    c.T = 5.0;
    CHECK(std::abs(afe_smoothed_sum(c) - afe_transformed_sum(c).value) < 1e-5);
}

TEST_CASE("afe tail estimate follows the power law") {
    SmoothWindow w;
    auto chi = primitive_characters(5).front();
    AFEInstance inst{chi, 100.0, 0.0, 0, &w};
    detail::AFEContour contour(inst, inst.tail_shift, 0, 0.0, 1e-3);
    double W = contour.abs_line_integral();
    CHECK(W > 0.0);
    auto per_term = [&](double n) {
        double x = 5.0 / (2.0 * std::numbers::pi * n * 100.0);
        return std::pow(x, inst.tail_shift) * W;
    };
    // doubling n shrinks the per-term bound by 2^A at A = 4
    CHECK(per_term(8.0) / per_term(16.0) == Approx(16.0).epsilon(1e-9));
    CHECK(per_term(10.0) / per_term(20.0) == Approx(16.0).epsilon(1e-9));
}

TEST_CASE("critical-line mean square is bounded below") {
    // int_{-M^2}^{M^2} |sum_{n<=M} chi(n) n^{-1/2-i(u+t)}|^2 du >= 0.1 M^2
    for (std::uint64_t q = 2; q <= 10; ++q) {
        for (const auto& chi : primitive_characters(q)) {
            for (std::uint64_t M : {10, 30}) {
                for (double t : {0.0, 5.0}) {
                    CAPTURE(q, chi.label(), M, t);
                    double I = afe_mean_square(chi, M, t);
                    REQUIRE(I >= 0.1 * static_cast<double>(M) * static_cast<double>(M));
                }
            }
        }
    }
}

TEST_CASE("perron integral recovers weighted partial sums") {
    auto chi1 = character(1, 0);

    // single spike a_2 = 1, z = 3: partial sum is chi(2)/sqrt(2)
    CoeffSequence spike(std::vector<cplx>{{0, 0}, {0, 0}, {1, 0}}, 1, 0);
    PerronResult pr = perron_truncated(spike, chi1, 3.0, 400.0);
    CHECK(std::abs(pr.value - cplx(1.0 / std::sqrt(2.0), 0)) <
          pr.truncation_error + 1e-6);
    CHECK(pr.truncation_error < 0.01);

    // below all support
    PerronResult low = perron_truncated(spike, chi1, 0.5, 400.0);
    CHECK(std::abs(low.value) < low.truncation_error + 1e-6);

    // moebius block against the direct partial sum
    SmoothWindow w;
    auto moe = build_coefficients(CoeffRole::moebius_block, 10.0, w);
    auto chi4 = character(4, 1);
    PerronResult pm = perron_truncated(moe, chi4, 15.0, 10000.0);
    SieveSegment seg = build_segment(2, 32);
    CompensatedComplexSum direct;
    for (std::uint64_t n = 11; n <= 15; ++n)
        direct.add(static_cast<double>(seg.mu_at(n)) * chi4.eval(n) /
                   std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(pm.value - direct.value()) < pm.truncation_error + 1e-5);

    CHECK_THROWS_AS(perron_truncated(spike, chi1, 0.0, 100.0), std::invalid_argument);
}
