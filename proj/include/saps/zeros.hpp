#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "saps/characters.hpp"
#include "saps/numeric.hpp"
#include "saps/sieve.hpp"

namespace saps {

struct ZeroRecord {
    std::uint64_t modulus = 1;
    std::string label = "0";
    double beta = 0.5;
    double gamma = 0.0;
};

// Nontrivial zeros keyed by character, with mandatory per-character
// completeness bounds.  Files carry gamma > 0 only; the conjugate -gamma
// records are materialized at ingestion.
class ZeroDataset {
  public:
    struct CharacterZeros {
        double complete_to = 0.0;
        std::vector<std::pair<double, double>> zeros;  // (beta, gamma), both signs
        std::size_t file_records = 0;
        std::size_t duplicates = 0;
    };

    using Key = std::pair<std::uint64_t, std::string>;

    const std::map<Key, CharacterZeros>& entries() const { return entries_; }
    std::size_t line_count() const { return line_count_; }
    std::size_t duplicate_count() const {
        std::size_t d = 0;
        for (const auto& [k, v] : entries_) d += v.duplicates;
        return d;
    }
    bool empty() const { return entries_.empty(); }

    const CharacterZeros& require(std::uint64_t q, const std::string& label,
                                  double needed_completeness) const {
        auto it = entries_.find({q, label});
        if (it == entries_.end())
            throw DataError("zero dataset: no records for character " +
                            std::to_string(q) + "." + label);
        if (needed_completeness > it->second.complete_to)
            throw DataError("zero dataset: query beyond certified completeness for " +
                            std::to_string(q) + "." + label);
        return it->second;
    }

    void add_header(std::uint64_t q, std::string label, double complete_to) {
        auto& e = entries_[{q, std::move(label)}];
        e.complete_to = std::max(e.complete_to, complete_to);
    }

    // gamma > 0 record; mirrors to -gamma
    void add_record(std::uint64_t q, const std::string& label, double beta,
                    double gamma) {
        auto& e = entries_[{q, label}];
        for (const auto& [b, g] : e.zeros) {
            if (std::abs(b - beta) < 1e-9 && std::abs(g - gamma) < 1e-9) {
                ++e.duplicates;
                return;
            }
        }
        ++e.file_records;
        e.zeros.emplace_back(beta, gamma);
        e.zeros.emplace_back(beta, -gamma);
    }

    void bump_lines(std::size_t n) { line_count_ += n; }

  private:
    std::map<Key, CharacterZeros> entries_;
    std::size_t line_count_ = 0;
};

// Format: header lines "# modulus=<q> label=<s> complete_to=<T>" open a
// character block; following lines hold "<gamma>" or "<beta> <gamma>".
// Other '#' lines are comments.
inline ZeroDataset ingest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open zero file: " + path.string());
    ZeroDataset ds;
    std::string line;
    std::size_t lineno = 0;
    bool have_block = false;
    std::uint64_t cur_q = 0;
    std::string cur_label;
    std::size_t records = 0;

    auto fail = [&](const std::string& what) {
        throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (line.find("modulus=") == std::string::npos) continue;  // comment
            long long q = -1;
            double complete_to = -1.0;
            std::string label;
            std::istringstream iss(line.substr(first + 1));
            std::string tok;
            while (iss >> tok) {
                if (tok.rfind("modulus=", 0) == 0) {
                    try {
                        q = std::stoll(tok.substr(8));
                    } catch (...) {
                        fail("bad modulus in header");
                    }
                } else if (tok.rfind("label=", 0) == 0) {
                    label = tok.substr(6);
                } else if (tok.rfind("complete_to=", 0) == 0) {
                    try {
                        complete_to = std::stod(tok.substr(12));
                    } catch (...) {
                        fail("bad complete_to in header");
                    }
                }
            }
            if (q < 1) fail("header needs modulus >= 1");
            if (label.empty()) fail("header needs label=");
            if (complete_to < 0) fail("header needs complete_to=");
            cur_q = static_cast<std::uint64_t>(q);
            cur_label = label;
            have_block = true;
            ds.add_header(cur_q, cur_label, complete_to);
            continue;
        }
        if (!have_block) fail("record before any character header");
        std::istringstream iss(line);
        double a = 0.0, b = 0.0;
        if (!(iss >> a)) fail("malformed record");
        double beta = 0.5, gamma = 0.0;
        if (iss >> b) {
            beta = a;
            gamma = b;
        } else {
            gamma = a;
        }
        std::string rest;
        if (iss.clear(), iss >> rest) fail("trailing tokens on record");
        if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0,1)");
        if (!(gamma > 0.0)) fail("gamma must be positive (conjugates are implied)");
        ds.add_record(cur_q, cur_label, beta, gamma);
        ++records;
    }
    ds.bump_lines(records);
    return ds;
}

// N(sigma, T, chi): zeros with beta >= sigma and |gamma| <= T, both signs
inline std::size_t count_zeros(const ZeroDataset& ds, double sigma, double T,
                               std::uint64_t q, const std::string& label) {
    if (!(sigma >= 0.5 && sigma <= 1.0))
        throw std::invalid_argument("count_zeros: need 1/2 <= sigma <= 1");
    const auto& e = ds.require(q, label, T);
    std::size_t c = 0;
    for (const auto& [beta, gamma] : e.zeros)
        if (beta >= sigma && std::abs(gamma) <= T) ++c;
    return c;
}

struct DensityParams {
    double c = 12.0 / 5.0;   // exponent in (Q^2 T)^{c(1-sigma)}
    int M_exp = 14;          // log power
    double sigma0 = 0.9;     // exceptional-set threshold
    double c0 = 10.0;        // sigma0 = 1 - c0 log log x / log x when derived
};

inline double sigma0_for(double x, double c0) {
    double L = std::log(x);
    return 1.0 - c0 * std::log(L) / L;
}

// sum over primitive characters q <= Q of N(sigma, T, chi), divided by
// (Q^2 T)^{c(1-sigma)} log^M(QT)
inline double density_ratio(const ZeroDataset& ds, std::uint64_t Q, double T,
                            double sigma, const DensityParams& params) {
    if (ds.empty()) return 0.0;
    double num = 0.0;
    for (std::uint64_t q = 1; q <= Q; ++q) {
        for (const auto& chi : enumerate_characters(q)) {
            if (!chi.is_primitive()) continue;
            num += static_cast<double>(
                count_zeros(ds, sigma, T, q, std::to_string(chi.label())));
        }
    }
    double qq = static_cast<double>(Q) * static_cast<double>(Q);
    double denom = std::pow(qq * T, params.c * (1.0 - sigma)) *
                   std::pow(std::log(static_cast<double>(Q) * T),
                            static_cast<double>(params.M_exp));
    return num / denom;
}

// moduli q <= Q that are multiples of some d carrying a primitive character
// with N(sigma0, x, chi) >= 1
inline std::set<std::uint64_t> exceptional_moduli(const ZeroDataset& ds, std::uint64_t Q,
                                                  double x, const DensityParams& params) {
    std::set<std::uint64_t> flagged;
    for (const auto& [key, entry] : ds.entries()) {
        auto [q, label] = key;
        std::uint64_t lab = 0;
        try {
            lab = std::stoull(label);
        } catch (...) {
            continue;  // labels of foreign schemes cannot flag moduli here
        }
        if (q > Q) continue;
        auto chi = character(q, lab);
        if (!chi.is_primitive()) continue;
        if (x > entry.complete_to)
            throw DataError("exceptional_moduli: completeness below x for " +
                            std::to_string(q) + "." + label);
        for (const auto& [beta, gamma] : entry.zeros) {
            if (beta >= params.sigma0 && std::abs(gamma) <= x) {
                flagged.insert(q);
                break;
            }
        }
    }
    std::set<std::uint64_t> out;
    for (std::uint64_t d : flagged)
        for (std::uint64_t m = d; m <= Q; m += d) out.insert(m);
    return out;
}

// one zero's contribution ((1+eta)^rho - 1)/rho * y^rho
inline cplx explicit_formula_term(cplx rho, double eta, double y) {
    cplx grow = std::exp(rho * std::log1p(eta)) - 1.0;
    return grow / rho * std::exp(rho * std::log(y));
}

// Reconstruction of the windowed Chebyshev sum over (y, y(1+eta)] from zeros
// with |gamma| <= T0.  For the principal/zeta case the main term eta*y and
// the lower-order corrections enter; for nonprincipal characters the zero
// sum alone (negated) is the reconstruction.
inline cplx explicit_formula_sum(const ZeroDataset& ds, std::uint64_t q,
                                 const std::string& label, double y, double eta,
                                 double T0, bool corrections = true) {
    if (!(y > 1.0) || eta < 0.0)
        throw std::invalid_argument("explicit_formula_sum: need y > 1, eta >= 0");
    const auto& e = ds.require(q, label, T0);
    if (eta == 0.0) return {0.0, 0.0};

    CompensatedComplexSum zero_sum;
    for (const auto& [beta, gamma] : e.zeros) {
        if (std::abs(gamma) > T0) continue;
        zero_sum.add(explicit_formula_term(cplx(beta, gamma), eta, y));
    }

    bool principal = false;
    if (q == 1) {
        principal = true;
    } else {
        try {
            principal = std::stoull(label) == 0;
        } catch (...) {
            principal = false;
        }
    }
    if (!principal) return -zero_sum.value();

    double main = eta * y;
    cplx out = cplx(main, 0.0) - zero_sum.value();
    if (corrections) {
        auto lower_order = [](double z) {
            return -std::log(2.0 * std::numbers::pi) -
                   0.5 * std::log1p(-1.0 / (z * z));
        };
        out += lower_order(y * (1.0 + eta)) - lower_order(y);
    }
    return out;
}

// max over ingested zeros of sum_{rho'} 1/(1 + |gamma - gamma'|) restricted
// to |gamma| <= T
inline double zero_spacing_statistic(const ZeroDataset& ds, std::uint64_t q,
                                     const std::string& label, double T) {
    const auto& e = ds.require(q, label, T);
    double worst = 0.0;
    for (const auto& [b1, g1] : e.zeros) {
        if (std::abs(g1) > T) continue;
        double s = 0.0;
        for (const auto& [b2, g2] : e.zeros) {
            if (std::abs(g2) > T) continue;
            s += 1.0 / (1.0 + std::abs(g1 - g2));
        }
        worst = std::max(worst, s);
    }
    return worst;
}

}  // namespace saps
