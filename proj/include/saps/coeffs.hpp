#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "saps/numeric.hpp"
#include "saps/sieve.hpp"
#include "saps/smooth.hpp"

namespace saps {

// Coefficients a_n of a Dirichlet polynomial, n in [1, N], carrying the
// divisor-bound profile (m, r) with |a_n| <= tau_m(n) (log n)^r.  The profile
// is verified against the stored values on construction.
class CoeffSequence {
  public:
    CoeffSequence(std::vector<cplx> values_from_1, unsigned bound_m, unsigned bound_r)
        : values_(std::move(values_from_1)), m_(bound_m), r_(bound_r) {
        if (values_.empty() || m_ < 1)
            throw std::invalid_argument("CoeffSequence: need nonempty values and m >= 1");
        for (std::size_t n = 1; n < values_.size(); ++n) {
            double bound = static_cast<double>(tau_m(m_, n));
            double ln = std::log(static_cast<double>(n));
            for (unsigned i = 0; i < r_; ++i) bound *= ln;
            if (std::abs(values_[n]) > bound * (1.0 + 1e-12) + 1e-12)
                throw std::invalid_argument(
                    "CoeffSequence: declared bound profile does not dominate values");
        }
    }

    static CoeffSequence zeros(std::uint64_t N, unsigned m = 1, unsigned r = 0) {
        return CoeffSequence(std::vector<cplx>(N + 1, cplx{0.0, 0.0}), m, r);
    }

    std::uint64_t max_n() const { return values_.size() - 1; }
    unsigned bound_m() const { return m_; }
    unsigned bound_r() const { return r_; }

    cplx at(std::uint64_t n) const {
        return n < values_.size() ? values_[n] : cplx{0.0, 0.0};
    }

    double sum_abs_squares() const {
        CompensatedSum s;
        for (std::size_t n = 1; n < values_.size(); ++n) s.add(std::norm(values_[n]));
        return s.value();
    }

    // rows "n,value" for integer n with nonzero coefficient
    void write_csv(std::ostream& out) const {
        out << "n,value\n";
        for (std::size_t n = 1; n < values_.size(); ++n) {
            if (values_[n] != cplx{0.0, 0.0}) out << n << ',' << values_[n].real() << '\n';
        }
    }

  private:
    std::vector<cplx> values_;
    unsigned m_;
    unsigned r_;
};

enum class CoeffRole { log_window, window, moebius_block };

// The three coefficient shapes attached to a dyadic scale N:
//   log_window:    a_n = g(n/N) log n          (m, r) = (1, 1)
//   window:        a_n = g(n/N)                (m, r) = (1, 0)
//   moebius_block: a_n = mu(n) for N < n <= 2N (m, r) = (1, 0)
inline CoeffSequence build_coefficients(CoeffRole role, double N,
                                        const SmoothWindow& window) {
    if (!(N >= 0.25)) throw std::invalid_argument("build_coefficients: need N >= 1/4");
    if (role == CoeffRole::moebius_block) {
        auto top = static_cast<std::uint64_t>(std::floor(2.0 * N));
        std::vector<cplx> a(top + 1, cplx{0.0, 0.0});
        if (top >= 2) {
            SieveSegment seg = build_segment(2, top + 1);
            for (std::uint64_t n = 2; n <= top; ++n)
                if (static_cast<double>(n) > N) a[n] = static_cast<double>(seg.mu_at(n));
        }
        if (top >= 1 && 1.0 > N) a[1] = 1.0;  // mu(1)
        return CoeffSequence(std::move(a), 1, 0);
    }
    auto top = static_cast<std::uint64_t>(std::floor(4.0 * N));
    std::vector<cplx> a(top + 1, cplx{0.0, 0.0});
    for (std::uint64_t n = 1; n <= top; ++n) {
        double gv = window.value(static_cast<double>(n) / N);
        if (gv == 0.0) continue;
        a[n] = role == CoeffRole::log_window ? gv * std::log(static_cast<double>(n)) : gv;
    }
    return CoeffSequence(std::move(a), 1, role == CoeffRole::log_window ? 1u : 0u);
}

}  // namespace saps
