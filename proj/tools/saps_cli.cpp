// saps: desk-scale statistics for primes in short arithmetic progressions.
//
// Subcommands cover the sieve tables, Dirichlet characters, the signed
// convolution identity for Lambda, the smooth dyadic partition, L-function
// checks, Dirichlet-polynomial statistics, zero-data audits, and the
// windowed error-term experiments.  Exit codes: 0 success, 2 configuration
// error, 3 data error, 4 internal invariant failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saps/analytic.hpp"
#include "saps/characters.hpp"
#include "saps/coeffs.hpp"
#include "saps/config.hpp"
#include "saps/dirichlet_poly.hpp"
#include "saps/experiments.hpp"
#include "saps/heath_brown.hpp"
#include "saps/report.hpp"
#include "saps/sieve.hpp"
#include "saps/smooth.hpp"
#include "saps/zeros.hpp"

namespace {

using namespace saps;

struct InvariantFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_report(const Report& rep, const RunConfig& cfg) {
    if (cfg.out.empty()) {
        rep.emit(std::cout, cfg, now_utc());
        return;
    }
    std::ofstream out(cfg.out, std::ios::trunc);
    if (!out) throw DataError("cannot open output file: " + cfg.out);
    rep.emit(out, cfg, now_utc());
}

SieveContext make_sieve(const RunConfig& cfg) {
    std::optional<std::filesystem::path> cache;
    if (!cfg.cache_dir.empty()) cache = cfg.cache_dir;
    return SieveContext(kDefaultSegmentSize, cache);
}

ErrorKind parse_kind(const std::string& k) {
    if (k == "E") return ErrorKind::E;
    if (k == "Eprime") return ErrorKind::Eprime;
    if (k == "Elambda") return ErrorKind::Elambda;
    throw ConfigError("kind must be one of E, Eprime, Elambda");
}

CoeffSequence parse_factor(const std::string& spec, const SmoothWindow& w) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("factor spec must look like window:100 or moebius:50");
    std::string role = spec.substr(0, colon);
    double N = std::stod(spec.substr(colon + 1));
    if (role == "window") return build_coefficients(CoeffRole::window, N, w);
    if (role == "log") return build_coefficients(CoeffRole::log_window, N, w);
    if (role == "moebius") return build_coefficients(CoeffRole::moebius_block, N, w);
    throw ConfigError("unknown factor role '" + role + "'");
}

// ---------------------------------------------------------------------------

int cmd_sieve(const RunConfig& cfg, std::uint64_t lo, std::uint64_t hi) {
    SieveSegment seg = build_segment(lo, hi, std::max(kDefaultSegmentSize, hi - lo));
    if (!cfg.cache_dir.empty()) {
        std::filesystem::create_directories(cfg.cache_dir);
        write_segment(seg, std::filesystem::path(cfg.cache_dir) /
                               ("seg_" + std::to_string(lo) + "_" + std::to_string(hi) +
                                ".saps"));
    }
    std::uint64_t primes = 0, mu_zero = 0, powers = 0;
    CompensatedSum lambda_mass;
    for (std::uint64_t n = lo; n < hi; ++n) {
        if (seg.is_prime(n)) ++primes;
        if (seg.mu_at(n) == 0) ++mu_zero;
        double l = seg.lambda_at(n);
        if (l > 0) {
            lambda_mass.add(l);
            if (!seg.is_prime(n)) ++powers;
        }
    }
    Report rep;
    rep.header = {"metric", "value"};
    rep.rows = {{"lo", std::to_string(lo)},
                {"hi", std::to_string(hi)},
                {"primes", std::to_string(primes)},
                {"proper_prime_powers", std::to_string(powers)},
                {"mu_zero", std::to_string(mu_zero)},
                {"lambda_mass", num_str(lambda_mass.value())}};
    write_report(rep, cfg);
    return 0;
}

int cmd_characters(const RunConfig& cfg, std::uint64_t q) {
    Report rep;
    rep.header = {"key", "label", "conductor", "parity", "primitive", "principal"};
    for (const auto& chi : enumerate_characters(q)) {
        rep.rows.push_back({chi.key(), std::to_string(chi.label()),
                            std::to_string(chi.conductor()),
                            std::to_string(chi.parity()),
                            chi.is_primitive() ? "1" : "0",
                            chi.is_principal() ? "1" : "0"});
    }
    rep.aggregate["q"] = q;
    rep.aggregate["count"] = rep.rows.size();
    write_report(rep, cfg);
    return 0;
}

int cmd_hb_verify(const RunConfig& cfg, double x_cap) {
    if (x_cap <= 0.0) x_cap = static_cast<double>(cfg.nmax) / 4.0;
    auto start = std::chrono::steady_clock::now();
    HBDecomposition hb = make_heath_brown(cfg.k0, x_cap);
    auto table = heath_brown_table(cfg.nmax, hb);
    SieveSegment seg = build_segment(2, cfg.nmax + 1,
                                     std::max(kDefaultSegmentSize, cfg.nmax + 1));
    double worst = 0.0;
    std::uint64_t worst_n = 0;
    for (std::uint64_t n = 2; n <= cfg.nmax; ++n) {
        double d = std::abs(table[n] - seg.lambda_at(n));
        if (d > worst) {
            worst = d;
            worst_n = n;
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    Report rep;
    rep.header = {"metric", "value"};
    rep.rows = {{"nmax", std::to_string(cfg.nmax)},
                {"k0", std::to_string(cfg.k0)},
                {"z", num_str(hb.z)},
                {"max_residual", num_str(worst)},
                {"worst_n", std::to_string(worst_n)},
                {"seconds", num_str(secs)}};
    rep.aggregate["max_residual"] = worst;
    write_report(rep, cfg);
    if (worst > 1e-9)
        throw InvariantFailure("decomposition residual exceeds 1e-9");
    return 0;
}

int cmd_partition_check(const RunConfig& cfg, std::uint64_t points, double x_max) {
    SmoothWindow w;
    double worst = 0.0, worst_x = 0.0;
    for (std::uint64_t i = 0; i < points; ++i) {
        double x = std::pow(x_max, static_cast<double>(i) /
                                       static_cast<double>(points - 1));
        double dev = std::abs(w.partition_sum(x) - 1.0);
        if (dev > worst) {
            worst = dev;
            worst_x = x;
        }
    }
    Report rep;
    rep.header = {"metric", "value"};
    rep.rows = {{"points", std::to_string(points)},
                {"x_max", num_str(x_max)},
                {"max_deviation", num_str(worst)},
                {"worst_x", num_str(worst_x)}};
    rep.aggregate["max_deviation"] = worst;
    write_report(rep, cfg);
    if (worst > 1e-8) throw InvariantFailure("partition of unity deviates beyond 1e-8");
    return 0;
}

int cmd_funceq(const RunConfig& cfg, double t_min, double t_max, double t_step) {
    Report rep;
    rep.header = {"q", "label", "t", "residual"};
    double worst = 0.0;
    for (std::uint64_t q = 2; q <= cfg.q_max; ++q) {
        for (const auto& chi : primitive_characters(q)) {
            for (double t = t_min; t <= t_max + 1e-12; t += t_step) {
                double r = functional_equation_residual(cplx(0.5, t), chi);
                worst = std::max(worst, r);
                rep.rows.push_back({std::to_string(q), std::to_string(chi.label()),
                                    num_str(t), num_str(r)});
            }
        }
    }
    rep.aggregate["max_residual"] = worst;
    write_report(rep, cfg);
    if (worst > 1e-6) throw InvariantFailure("functional equation residual beyond 1e-6");
    return 0;
}

int cmd_afe(const RunConfig& cfg, std::vector<double> scales, std::vector<double> ts,
            std::vector<std::uint64_t> rs) {
    if (scales.empty()) scales = {100.0};
    if (ts.empty()) ts = {0.0};
    if (rs.empty()) rs = {0};
    SmoothWindow w;
    Report rep;
    rep.header = {"q", "label", "N", "t", "r",
                  "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"};
    double worst = 0.0, worst_tail = 0.0;
    for (std::uint64_t q = 2; q <= cfg.q_max; ++q) {
        for (const auto& chi : primitive_characters(q)) {
            for (double N : scales) {
                for (double t : ts) {
                    for (std::uint64_t r : rs) {
                        AFEInstance inst{chi, N, t, static_cast<unsigned>(r), &w};
                        inst.T = std::max(2.0, std::abs(t));
                        cplx lhs = afe_smoothed_sum(inst);
                        AFETransformed rhs = afe_transformed_sum(inst);
                        double res = std::abs(lhs - rhs.value);
                        worst = std::max(worst, res);
                        worst_tail = std::max(worst_tail, rhs.tail_bound);
                        rep.rows.push_back(
                            {std::to_string(q), std::to_string(chi.label()), num_str(N),
                             num_str(t), std::to_string(r), num_str(lhs.real()),
                             num_str(lhs.imag()), num_str(rhs.value.real()),
                             num_str(rhs.value.imag()), num_str(res)});
                    }
                }
            }
        }
    }
    rep.aggregate["max_residual"] = worst;
    rep.aggregate["max_tail_bound"] = worst_tail;
    write_report(rep, cfg);
    if (worst > 1e-5) throw InvariantFailure("smoothed/transformed residual beyond 1e-5");
    return 0;
}

int cmd_meanvalue(const RunConfig& cfg, std::uint64_t n_len, std::uint64_t trials,
                  double cap) {
    std::mt19937_64 rng(splitmix64(cfg.seed));
    Report rep;
    rep.header = {"trial", "lhs", "ratio"};
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::vector<cplx> a(n_len + 1, cplx{0.0, 0.0});
        for (std::uint64_t n = 1; n <= n_len; ++n)
            a[n] = (rng() & 1) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
        auto res = mean_value_ratio(CoeffSequence(std::move(a), 1, 0), cfg.q_max,
                                    cfg.t_max);
        worst = std::max(worst, res.ratio);
        rep.rows.push_back(
            {std::to_string(trial), num_str(res.lhs), num_str(res.ratio)});
    }
    rep.aggregate["max_ratio"] = worst;
    rep.aggregate["cap"] = cap;
    write_report(rep, cfg);
    if (worst > cap) throw InvariantFailure("mean-value ratio exceeds the configured cap");
    return 0;
}

int cmd_large_values(const RunConfig& cfg, std::uint64_t D,
                     const std::vector<std::string>& factor_specs,
                     const std::vector<double>& thresholds) {
    SmoothWindow w;
    std::vector<CoeffSequence> factors;
    for (const auto& s : factor_specs) factors.push_back(parse_factor(s, w));
    auto family = primitive_family(D, 2 * D);
    auto [r0, r1] = extract_large_values(factors, family, cfg.t_max, thresholds,
                                         cfg.grid_step);
    Report rep;
    rep.header = {"q", "label", "t"};
    for (std::size_t j = 0; j < factors.size(); ++j)
        rep.header.push_back("mag_" + std::to_string(j + 1));
    rep.header.push_back("parity");
    auto push = [&](const LargeValueSet& s, int parity) {
        for (const auto& p : s.points) {
            std::vector<std::string> row{std::to_string(p.q), std::to_string(p.label),
                                         num_str(p.t)};
            for (double m : p.factor_mags) row.push_back(num_str(m));
            row.push_back(std::to_string(parity));
            rep.rows.push_back(std::move(row));
        }
    };
    push(r0, 0);
    push(r1, 1);
    rep.aggregate["points_even"] = r0.points.size();
    rep.aggregate["points_odd"] = r1.points.size();
    rep.aggregate["well_spaced"] = r0.well_spaced() && r1.well_spaced();
    write_report(rep, cfg);
    return 0;
}

int cmd_zeros_count(const RunConfig& cfg, std::uint64_t q, const std::string& label) {
    ZeroDataset ds = ingest(cfg.zeros_file);
    auto n = count_zeros(ds, cfg.sigma, cfg.t0, q, label);
    Report rep;
    rep.header = {"metric", "value"};
    rep.rows = {{"q", std::to_string(q)},
                {"label", label},
                {"sigma", num_str(cfg.sigma)},
                {"t0", num_str(cfg.t0)},
                {"count", std::to_string(n)},
                {"file_lines", std::to_string(ds.line_count())},
                {"duplicates", std::to_string(ds.duplicate_count())}};
    rep.aggregate["count"] = n;
    write_report(rep, cfg);
    return 0;
}

int cmd_density_audit(const RunConfig& cfg) {
    ZeroDataset ds = ingest(cfg.zeros_file);
    DensityParams params;
    params.c = cfg.c_exp;
    params.M_exp = cfg.m_exp;
    params.c0 = cfg.c0;
    params.sigma0 = sigma0_for(cfg.x, cfg.c0);
    double ratio = density_ratio(ds, cfg.q_max, cfg.t0, cfg.sigma, params);
    auto bad = exceptional_moduli(ds, cfg.q_max, std::min(cfg.x, cfg.t0), params);
    Report rep;
    rep.header = {"metric", "value"};
    rep.rows = {{"q_max", std::to_string(cfg.q_max)},
                {"t0", num_str(cfg.t0)},
                {"sigma", num_str(cfg.sigma)},
                {"c_exp", num_str(cfg.c_exp)},
                {"m_exp", std::to_string(cfg.m_exp)},
                {"sigma0", num_str(params.sigma0)},
                {"density_ratio", num_str(ratio)},
                {"exceptional_count", std::to_string(bad.size())}};
    rep.aggregate["density_ratio"] = ratio;
    ordered_json ex = ordered_json::array();
    for (auto d : bad) ex.push_back(d);
    rep.aggregate["exceptional_moduli"] = ex;
    write_report(rep, cfg);
    return 0;
}

int cmd_explicit_formula(const RunConfig& cfg, std::uint64_t q, const std::string& label,
                         double y, double eta, bool corrections) {
    ZeroDataset ds = ingest(cfg.zeros_file);
    cplx rec = explicit_formula_sum(ds, q, label, y, eta, cfg.t0, corrections);
    Report rep;
    rep.header = {"y", "eta", "t0", "rec_re", "rec_im", "sieve_psi_diff", "abs_err"};
    std::string truth, err;
    if (q == 1 && eta > 0.0) {
        SieveContext sieve = make_sieve(cfg);
        double psi = sieve.psi_short(y, eta * y, 1, 0);
        truth = num_str(psi);
        err = num_str(std::abs(rec.real() - psi));
        rep.aggregate["abs_err"] = std::abs(rec.real() - psi);
    }
    rep.rows.push_back({num_str(y), num_str(eta), num_str(cfg.t0), num_str(rec.real()),
                        num_str(rec.imag()), truth, err});
    write_report(rep, cfg);
    return 0;
}

int cmd_e_average(const RunConfig& cfg, const std::string& kind_name, bool exact) {
    SieveContext sieve = make_sieve(cfg);
    ErrorKind kind = parse_kind(kind_name);
    ExperimentConfig ecfg = cfg.experiment();
    if (!ecfg.hypothesis_ok())
        std::cerr << "warning: Q^2 exceeds h / x^{alpha+epsilon}; exploring anyway\n";
    ErrorReport er = averaged_error(sieve, ecfg, kind);
    Report rep;
    rep.header = {"y", "q", "value"};
    for (const auto& row : er.rows)
        rep.rows.push_back({num_str(row.y), std::to_string(row.q), num_str(row.value)});
    rep.aggregate["estimate"] = er.estimate;
    rep.aggregate["sampling_error"] = er.sampling_error;
    rep.aggregate["normalized"] = er.normalized;
    rep.aggregate["eta"] = er.eta;
    rep.aggregate["hypothesis_ok"] = er.hypothesis_ok;
    rep.aggregate["oracle_mismatches"] = er.oracle_mismatches;
    rep.aggregate["kind"] = kind_name;
    if (exact) {
        double ev = averaged_error_exact(sieve, cfg.x, cfg.resolved_h(), cfg.q_max, kind);
        rep.aggregate["exact_value"] = ev;
    }
    write_report(rep, cfg);
    if (er.oracle_mismatches > 0)
        throw InvariantFailure("sampled error terms disagree with the oracle");
    return 0;
}

int cmd_dyadic_check(const RunConfig& cfg, double y, double eta, std::uint64_t q) {
    SieveContext sieve = make_sieve(cfg);
    auto r = dyadic_cover_check(sieve, y, cfg.resolved_h(), q, eta);
    Report rep;
    rep.header = {"metric", "value"};
    rep.rows = {{"y", num_str(y)},
                {"h", num_str(cfg.resolved_h())},
                {"q", std::to_string(q)},
                {"eta", num_str(eta)},
                {"lhs", num_str(r.lhs)},
                {"rhs", num_str(r.rhs)},
                {"boundary", num_str(r.boundary)},
                {"blocks", std::to_string(r.blocks)}};
    rep.aggregate["holds"] = r.lhs <= r.rhs + 1e-12;
    write_report(rep, cfg);
    if (r.lhs > r.rhs + 1e-12)
        throw InvariantFailure("dyadic covering inequality violated");
    return 0;
}

int cmd_thm3(const RunConfig& cfg) {
    SieveContext sieve = make_sieve(cfg);
    ExperimentConfig ecfg = cfg.experiment();
    auto rep3 = theorem3_pair_fraction(sieve, ecfg, cfg.c_threshold);
    // empirical threshold curve from the per-pair maxima
    auto sorted = rep3.pair_thresholds;
    std::sort(sorted.begin(), sorted.end());
    Report rep;
    rep.header = {"c", "fraction"};
    std::size_t n = sorted.size();
    for (std::size_t i = 0; i < n; ++i) {
        rep.rows.push_back({num_str(sorted[i]),
                            num_str(static_cast<double>(n - i) / static_cast<double>(n))});
    }
    rep.aggregate["c"] = cfg.c_threshold;
    rep.aggregate["fraction"] = rep3.fraction;
    rep.aggregate["oracle_mismatches"] = rep3.oracle_mismatches;
    write_report(rep, cfg);
    if (rep3.oracle_mismatches > 0)
        throw InvariantFailure("pair masses disagree with the oracle");
    return 0;
}

int cmd_smk(const RunConfig& cfg, bool verify) {
    auto start = std::chrono::steady_clock::now();
    std::uint64_t count = smk_count(cfg.smk_m, cfg.smk_k);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    Report rep;
    rep.header = {"metric", "value"};
    rep.rows = {{"M", std::to_string(cfg.smk_m)},
                {"K", std::to_string(cfg.smk_k)},
                {"count", std::to_string(count)},
                {"ratio_to_MK",
                 num_str(static_cast<double>(count) /
                         static_cast<double>(cfg.smk_m * cfg.smk_k))},
                {"seconds", num_str(secs)}};
    rep.aggregate["count"] = count;
    if (verify) {
        std::uint64_t oracle = bruteforce::smk_count(cfg.smk_m, cfg.smk_k);
        rep.aggregate["oracle"] = oracle;
        write_report(rep, cfg);
        if (oracle != count) throw InvariantFailure("smk count disagrees with the oracle");
        return 0;
    }
    write_report(rep, cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace saps;

    RunConfig cfg;

    // load --config first so explicit flags can override file values
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
                cfg = load_config(args[i + 1]);
                args.erase(args.begin() + static_cast<long>(i),
                           args.begin() + static_cast<long>(i) + 2);
                break;
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"statistics of primes in short arithmetic progressions"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help");

    bool h_flag = false, theta_flag = false;
    auto attach_common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print this help");
        sub->add_option("--x", cfg.x);
        sub->add_option("--h", cfg.h)
            ->check(CLI::PositiveNumber)
            ->each([&](const std::string&) { h_flag = true; });
        sub->add_option("--theta", cfg.theta)->each(
            [&](const std::string&) { theta_flag = true; });
        sub->add_option("--q-max", cfg.q_max);
        sub->add_option("--a-exp", cfg.a_exp);
        sub->add_option("--epsilon", cfg.epsilon);
        sub->add_option("--samples", cfg.samples);
        sub->add_option("--strata", cfg.strata);
        sub->add_option("--seed", cfg.seed);
        sub->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", cfg.out);
        sub->add_option("--cache-dir", cfg.cache_dir);
        sub->add_option("--threads", cfg.threads);
        sub->add_option("--zeros-file", cfg.zeros_file);
    };

    std::uint64_t lo = 2, hi = 1 << 16;
    auto* sieve_cmd = app.add_subcommand("sieve", "build arithmetic tables over [lo, hi)");
    attach_common(sieve_cmd);
    sieve_cmd->add_option("--lo", lo);
    sieve_cmd->add_option("--hi", hi);

    std::uint64_t char_q = 12;
    auto* char_cmd = app.add_subcommand("characters", "list the character group mod q");
    attach_common(char_cmd);
    char_cmd->add_option("--q", char_q);

    double x_cap = 0.0;
    auto* hb_cmd =
        app.add_subcommand("hb-verify", "check the signed convolution identity for Lambda");
    attach_common(hb_cmd);
    hb_cmd->add_option("--nmax", cfg.nmax);
    hb_cmd->add_option("--k0", cfg.k0);
    hb_cmd->add_option("--x-cap", x_cap);

    std::uint64_t points = 10000;
    double x_max_part = 1e6;
    auto* part_cmd =
        app.add_subcommand("partition-check", "sweep the dyadic partition of unity");
    attach_common(part_cmd);
    part_cmd->add_option("--points", points);
    part_cmd->add_option("--x-max", x_max_part);

    std::vector<double> afe_scales, afe_ts;
    std::vector<std::uint64_t> afe_rs;
    auto* afe_cmd = app.add_subcommand(
        "afe-check", "smoothed sums against their transformed contour form");
    attach_common(afe_cmd);
    afe_cmd->add_option("--n-scale", afe_scales);
    afe_cmd->add_option("--t", afe_ts);
    afe_cmd->add_option("--r", afe_rs);

    double t_min = -10.0, t_max_fe = 10.0, t_step = 0.5;
    auto* fe_cmd = app.add_subcommand("funceq-check",
                                      "L-function functional equation residuals");
    attach_common(fe_cmd);
    fe_cmd->add_option("--t-min", t_min);
    fe_cmd->add_option("--t-max", t_max_fe);
    fe_cmd->add_option("--t-step", t_step);

    std::uint64_t mv_n = 2000, mv_trials = 10;
    double mv_cap = 10.0;
    auto* mv_cmd = app.add_subcommand(
        "meanvalue", "hybrid mean value of random-sign Dirichlet polynomials");
    attach_common(mv_cmd);
    mv_cmd->add_option("--n", mv_n);
    mv_cmd->add_option("--trials", mv_trials);
    mv_cmd->add_option("--t-max", cfg.t_max);
    mv_cmd->add_option("--cap", mv_cap);

    std::uint64_t lv_d = 4;
    std::vector<std::string> lv_factors;
    std::vector<double> lv_u;
    auto* lv_cmd =
        app.add_subcommand("large-values", "well-spaced large-value extraction");
    attach_common(lv_cmd);
    lv_cmd->add_option("--d", lv_d);
    lv_cmd->add_option("--factor", lv_factors);
    lv_cmd->add_option("--u", lv_u);
    lv_cmd->add_option("--t-max", cfg.t_max);
    lv_cmd->add_option("--grid-step", cfg.grid_step);

    std::uint64_t zc_q = 1;
    std::string zc_label = "0";
    auto* zc_cmd = app.add_subcommand("zeros-count", "N(sigma, T, chi) from a zero file");
    attach_common(zc_cmd);
    zc_cmd->add_option("--q", zc_q);
    zc_cmd->add_option("--label", zc_label);
    zc_cmd->add_option("--sigma", cfg.sigma);
    zc_cmd->add_option("--t0", cfg.t0);

    auto* da_cmd =
        app.add_subcommand("density-audit", "zero-density ratio and exceptional moduli");
    attach_common(da_cmd);
    da_cmd->add_option("--t0", cfg.t0);
    da_cmd->add_option("--sigma", cfg.sigma);
    da_cmd->add_option("--c-exp", cfg.c_exp);
    da_cmd->add_option("--m-exp", cfg.m_exp);
    da_cmd->add_option("--c0", cfg.c0);

    std::uint64_t ef_q = 1;
    std::string ef_label = "0";
    double ef_y = 100.0, ef_eta = 0.5;
    bool ef_nocorr = false;
    auto* ef_cmd = app.add_subcommand("explicit-formula",
                                      "windowed Chebyshev sums from zero data");
    attach_common(ef_cmd);
    ef_cmd->add_option("--q", ef_q);
    ef_cmd->add_option("--label", ef_label);
    ef_cmd->add_option("--y", ef_y);
    ef_cmd->add_option("--eta", ef_eta);
    ef_cmd->add_option("--t0", cfg.t0);
    ef_cmd->add_flag("--no-corrections", ef_nocorr);

    std::string ea_kind = "E";
    bool ea_exact = false;
    auto* ea_cmd = app.add_subcommand(
        "e-average", "sampled average of windowed progression error terms");
    attach_common(ea_cmd);
    ea_cmd->add_option("--kind", ea_kind);
    ea_cmd->add_flag("--exact", ea_exact);

    double dy_y = 1e5, dy_eta = 1e-3;
    std::uint64_t dy_q = 7;
    auto* dy_cmd =
        app.add_subcommand("dyadic-check", "window covering inequality for E'");
    attach_common(dy_cmd);
    dy_cmd->add_option("--y", dy_y);
    dy_cmd->add_option("--eta", dy_eta);
    dy_cmd->add_option("--q", dy_q);

    auto* t3_cmd = app.add_subcommand(
        "thm3-count", "fraction of (q, n) pairs with primes in every progression");
    attach_common(t3_cmd);
    t3_cmd->add_option("--c", cfg.c_threshold);

    bool smk_verify = false;
    auto* smk_cmd = app.add_subcommand("smk", "prime-in-Hasse-interval pair counting");
    attach_common(smk_cmd);
    smk_cmd->add_option("--m", cfg.smk_m);
    smk_cmd->add_option("--k", cfg.smk_k);
    smk_cmd->add_flag("--verify", smk_verify);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (h_flag) cfg.h_set = true;
        if (theta_flag) cfg.theta_set = true;
        if (cfg.h_set && cfg.theta_set)
            throw ConfigError("conflicting keys 'h' and 'theta': set exactly one");
        if (sieve_cmd->parsed()) return cmd_sieve(cfg, lo, hi);
        if (char_cmd->parsed()) return cmd_characters(cfg, char_q);
        if (hb_cmd->parsed()) return cmd_hb_verify(cfg, x_cap);
        if (part_cmd->parsed()) return cmd_partition_check(cfg, points, x_max_part);
        if (afe_cmd->parsed()) return cmd_afe(cfg, afe_scales, afe_ts, afe_rs);
        if (fe_cmd->parsed()) return cmd_funceq(cfg, t_min, t_max_fe, t_step);
        if (mv_cmd->parsed()) return cmd_meanvalue(cfg, mv_n, mv_trials, mv_cap);
        if (lv_cmd->parsed()) return cmd_large_values(cfg, lv_d, lv_factors, lv_u);
        if (zc_cmd->parsed()) return cmd_zeros_count(cfg, zc_q, zc_label);
        if (da_cmd->parsed()) return cmd_density_audit(cfg);
        if (ef_cmd->parsed())
            return cmd_explicit_formula(cfg, ef_q, ef_label, ef_y, ef_eta, !ef_nocorr);
        if (ea_cmd->parsed()) return cmd_e_average(cfg, ea_kind, ea_exact);
        if (dy_cmd->parsed()) return cmd_dyadic_check(cfg, dy_y, dy_eta, dy_q);
        if (t3_cmd->parsed()) return cmd_thm3(cfg);
        if (smk_cmd->parsed()) return cmd_smk(cfg, smk_verify);
        std::cerr << app.help();
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const InvariantFailure& e) {
        std::cerr << "invariant failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
