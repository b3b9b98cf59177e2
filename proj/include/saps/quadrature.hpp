#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "saps/numeric.hpp"

namespace saps {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss, nodes on [-1,1].
inline constexpr double kKronrodNodes[15] = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double kKronrodWeights[15] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

// Gauss weights sit at the odd Kronrod nodes.
inline constexpr double kGaussWeights[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

inline double vnorm(double x) { return std::abs(x); }
inline double vnorm(cplx x) { return std::abs(x); }

template <typename T, typename F>
void gk15(const F& f, double a, double b, T& kronrod, double& err) {
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    T kr{};
    T gs{};
    for (int i = 0; i < 15; ++i) {
        T v = f(mid + half * kKronrodNodes[i]);
        kr += kKronrodWeights[i] * v;
        if (i % 2 == 1) gs += kGaussWeights[i / 2] * v;
    }
    kronrod = half * kr;
    // |K15 - G7| overestimates the K15 error, which keeps refinement honest.
    err = vnorm(half * (kr - gs));
}

template <typename T, typename F>
T adapt(const F& f, double a, double b, double tol, int depth, double* err_out) {
    T whole;
    double err;
    gk15<T>(f, a, b, whole, err);
    if (err <= tol || b - a < 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) {
        if (err_out) *err_out += err;
        return whole;
    }
    if (depth <= 0)
        throw QuadratureError("adaptive quadrature failed to converge");
    double mid = 0.5 * (a + b);
    return adapt<T>(f, a, mid, 0.5 * tol, depth - 1, err_out) +
           adapt<T>(f, mid, b, 0.5 * tol, depth - 1, err_out);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a,b] to absolute tolerance.
template <typename F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                 int max_depth = 48, double* err_out = nullptr) {
    if (err_out) *err_out = 0.0;
    if (a == b) return 0.0;
    return detail::adapt<double>(f, a, b, abs_tol, max_depth, err_out);
}

template <typename F>
cplx integrate_complex(const F& f, double a, double b, double abs_tol = 1e-12,
                       int max_depth = 48, double* err_out = nullptr) {
    if (err_out) *err_out = 0.0;
    if (a == b) return {0.0, 0.0};
    return detail::adapt<cplx>(f, a, b, abs_tol, max_depth, err_out);
}

}  // namespace saps
