#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "saps/sieve.hpp"
#include "saps/zeros.hpp"

using namespace saps;
using Catch::Approx;

namespace {

std::filesystem::path data_dir() { return SAPS_TEST_DATA_DIR; }

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream out(p);
    out << body;
    return p;
}

}  // namespace

TEST_CASE("ingest: small zeta file") {
    auto p = write_temp("saps_zeros_small.txt",
                        "# modulus=1 label=0 complete_to=30\n"
                        "14.134725\n"
                        "21.022040\n"
                        "25.010858\n");
    ZeroDataset ds = ingest(p);
    CHECK(ds.line_count() == 3);
    REQUIRE(ds.entries().size() == 1);
    const auto& e = ds.entries().begin()->second;
    CHECK(e.file_records == 3);
    CHECK(e.zeros.size() == 6);  // conjugates materialized
    CHECK(count_zeros(ds, 0.5, 30.0, 1, "0") == 6);
}

TEST_CASE("ingest: malformed inputs are named by line") {
    auto bad_mod = write_temp("saps_zeros_badmod.txt",
                              "# modulus=-3 label=0 complete_to=10\n1.5\n");
    try {
        ingest(bad_mod);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }

    auto no_header = write_temp("saps_zeros_nohdr.txt", "# a comment\n14.1\n");
    CHECK_THROWS_AS(ingest(no_header), DataError);

    auto bad_rec = write_temp("saps_zeros_badrec.txt",
                              "# modulus=1 label=0 complete_to=10\nabc\n");
    try {
        ingest(bad_rec);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }

    auto neg_gamma = write_temp("saps_zeros_neggam.txt",
                                "# modulus=1 label=0 complete_to=10\n-2.5\n");
    CHECK_THROWS_AS(ingest(neg_gamma), DataError);

    CHECK_THROWS_AS(ingest(data_dir() / "no_such_file.txt"), DataError);
}

TEST_CASE("ingest: duplicates are dropped and counted") {
    auto p = write_temp("saps_zeros_dup.txt",
                        "# modulus=1 label=0 complete_to=30\n"
                        "14.134725\n"
                        "14.134725\n"
                        "21.022040\n");
    ZeroDataset ds = ingest(p);
    CHECK(ds.duplicate_count() == 1);
    CHECK(count_zeros(ds, 0.5, 30.0, 1, "0") == 4);
}

TEST_CASE("count_zeros on the verified zeta data") {
    ZeroDataset ds = ingest(data_dir() / "zeta_zeros.txt");
    CHECK(count_zeros(ds, 0.5, 30.0, 1, "0") == 6);
    CHECK(count_zeros(ds, 0.6, 100.0, 1, "0") == 0);  // RH-verified betas
    CHECK(count_zeros(ds, 0.5, 1.0, 1, "0") == 0);
    CHECK(count_zeros(ds, 0.5, 100.0, 1, "0") == 58);  // 29 ordinates, doubled

    // monotonicity: nonincreasing in sigma, nondecreasing in T
    std::size_t prev = 1000000;
    for (double sigma : {0.5, 0.6, 0.8, 1.0}) {
        auto c = count_zeros(ds, sigma, 50.0, 1, "0");
        CHECK(c <= prev);
        prev = c;
    }
    prev = 0;
    for (double T : {1.0, 20.0, 60.0, 250.0}) {
        auto c = count_zeros(ds, 0.5, T, 1, "0");
        CHECK(c >= prev);
        prev = c;
    }

    CHECK_THROWS_AS(count_zeros(ds, 0.5, 300.0, 1, "0"), DataError);  // completeness
    CHECK_THROWS_AS(count_zeros(ds, 0.5, 30.0, 3, "1"), DataError);   // absent
    CHECK_THROWS_AS(count_zeros(ds, 0.4, 30.0, 1, "0"), std::invalid_argument);
}

TEST_CASE("density ratio") {
    DensityParams params;
    params.c = 12.0 / 5.0;
    params.M_exp = 14;

    ZeroDataset empty;
    CHECK(density_ratio(empty, 5, 10.0, 0.75, params) == 0.0);

    ZeroDataset ds = ingest(data_dir() / "zeta_zeros.txt");
    CHECK(density_ratio(ds, 1, 30.0, 1.0, params) == 0.0);  // no beta = 1 zeros

    double got = density_ratio(ds, 1, 30.0, 0.5, params);
    double expect = 6.0 / (std::pow(30.0, 1.2) * std::pow(std::log(30.0), 14.0));
    CHECK(got == Approx(expect).epsilon(1e-12));

    // q = 2 has no primitive characters, so Q = 2 changes only the denominator
    double got2 = density_ratio(ds, 2, 30.0, 0.5, params);
    double expect2 =
        6.0 / (std::pow(4.0 * 30.0, 1.2) * std::pow(std::log(2.0 * 30.0), 14.0));
    CHECK(got2 == Approx(expect2).epsilon(1e-12));

    // missing characters are an error once the family requires them
    CHECK_THROWS_AS(density_ratio(ds, 3, 30.0, 0.5, params), DataError);
}

TEST_CASE("exceptional moduli") {
    DensityParams params;
    params.sigma0 = 0.9;

    ZeroDataset rh = ingest(data_dir() / "zeta_zeros.txt");
    CHECK(exceptional_moduli(rh, 30, 100.0, params).empty());

    ZeroDataset synth;
    synth.add_header(7, "1", 50.0);
    synth.add_record(7, "1", 0.95, 3.0);
    auto bad = exceptional_moduli(synth, 30, 50.0, params);
    CHECK(bad == std::set<std::uint64_t>{7, 14, 21, 28});

    CHECK(exceptional_moduli(synth, 5, 50.0, params).empty());

    // upward closure under multiplication within [1, Q]
    for (std::uint64_t d : bad)
        for (std::uint64_t m = d; m <= 30; m += d) CHECK(bad.count(m) == 1);

    // completeness below x is refused
    CHECK_THROWS_AS(exceptional_moduli(synth, 30, 80.0, params), DataError);

    // sigma0 derivation helper
    CHECK(sigma0_for(1e6, 10.0) ==
          Approx(1.0 - 10.0 * std::log(std::log(1e6)) / std::log(1e6)).epsilon(1e-15));
}

TEST_CASE("explicit formula: basic identities and bounds") {
    ZeroDataset ds = ingest(data_dir() / "zeta_zeros.txt");

    CHECK(explicit_formula_sum(ds, 1, "0", 100.0, 0.0, 50.0) == cplx(0.0, 0.0));

    // per-term envelope |((1+eta)^rho - 1)/rho| <= min{eta(1+eta), 2/|rho|} (1+eta)
    for (double eta : {0.05, 0.5, 2.0}) {
        for (const auto& [beta, gamma] : ds.entries().begin()->second.zeros) {
            cplx rho(beta, gamma);
            double lhs = std::abs((std::exp(rho * std::log1p(eta)) - 1.0) / rho);
            double rhs = std::min(eta * (1.0 + eta), 2.0 / std::abs(rho)) * (1.0 + eta);
            REQUIRE(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    CHECK_THROWS_AS(explicit_formula_sum(ds, 1, "0", 100.0, 0.5, 500.0), DataError);
}

TEST_CASE("explicit formula: reconstruction against frozen oracle values") {
    // values confirmed by an independent high-precision evaluation of the
    // same zero sum (30-digit arithmetic)
    ZeroDataset ds = ingest(data_dir() / "zeta_zeros.txt");
    auto rec = [&](double y, double T0) {
        return explicit_formula_sum(ds, 1, "0", y, 0.5, T0);
    };
    CHECK(rec(100.0, 30.0).real() == Approx(52.01148021).margin(1e-6));
    CHECK(rec(500.0, 30.0).real() == Approx(244.3479259).margin(1e-6));
    CHECK(rec(1000.0, 100.0).real() == Approx(506.519305).margin(1e-6));
    CHECK(std::abs(rec(100.0, 30.0).imag()) < 1e-12);

    // long-run convergence: median error shrinks from the shortest to the
    // longest truncation (pointwise monotonicity is not guaranteed)
    SieveContext sieve;
    auto median_err = [&](double T0) {
        std::vector<double> errs;
        for (double y : {100.0, 500.0, 1000.0}) {
            double truth = sieve.psi_short(y, 0.5 * y, 1, 0);
            errs.push_back(std::abs(rec(y, T0).real() - truth));
        }
        std::sort(errs.begin(), errs.end());
        return errs[1];
    };
    CHECK(median_err(250.0) < median_err(30.0));

    // the worst-case error over the y sample is monotone through the
    // standard truncations
    auto max_err = [&](double T0) {
        double worst = 0.0;
        for (double y : {100.0, 500.0, 1000.0}) {
            double truth = sieve.psi_short(y, 0.5 * y, 1, 0);
            worst = std::max(worst, std::abs(rec(y, T0).real() - truth));
        }
        return worst;
    };
    CHECK(max_err(50.0) <= max_err(30.0));
    CHECK(max_err(100.0) <= max_err(50.0));
}

TEST_CASE("zero spacing statistic") {
    ZeroDataset ds = ingest(data_dir() / "zeta_zeros.txt");
    double s = zero_spacing_statistic(ds, 1, "0", 100.0);
    REQUIRE(std::isfinite(s));
    REQUIRE(s > 0.0);
    double C = s / std::pow(std::log(100.0), 2.0);
    CAPTURE(s, C);
    CHECK(C < 10.0);  // comfortably finite at this scale
}
