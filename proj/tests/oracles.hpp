// Test-side oracles, deliberately independent of the library's own numerical
// paths: plain midpoint quadrature against the adaptive Simpson, an
// eigendecomposition exponential against the trace-split closed form, and a
// direct Poisson-conjugate kernel sum against the traced/outer arguments.
#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "ncclab/mat2.hpp"

namespace oracles {

using cplx = std::complex<double>;

/// Plain midpoint rule.
inline double midpoint_integral(const std::function<double(double)>& f,
                                double a, double b, int n) {
    double acc = 0.0;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) acc += f(a + (i + 0.5) * h);
    return acc * h;
}

/// exp(x M) for a constant 2x2 M via the eigendecomposition
/// exp(xM) = e^{x l+} (M - l- I)/(l+ - l-) + e^{x l-} (M - l+ I)/(l- - l+).
inline ncclab::Mat2 expm_eigen(const ncclab::Mat2& m, double x) {
    const cplx tr = m.trace();
    const cplx det = m.det();
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    const cplx lp = 0.5 * (tr + disc);
    const cplx lm = 0.5 * (tr - disc);
    if (std::abs(lp - lm) < 1e-9) {
        // nearly defective: exp(xM) = e^{x l} (I + x (M - l I))
        const cplx l = 0.5 * tr;
        const cplx e = std::exp(x * l);
        ncclab::Mat2 n{m.m00 - l, m.m01, m.m10, m.m11 - l};
        return ncclab::Mat2::identity() * e + n * (e * x);
    }
    const cplx ep = std::exp(x * lp), em = std::exp(x * lm);
    ncclab::Mat2 pp{m.m00 - lm, m.m01, m.m10, m.m11 - lm};
    ncclab::Mat2 pm{m.m00 - lp, m.m01, m.m10, m.m11 - lp};
    return pp * (ep / (lp - lm)) + pm * (em / (lm - lp));
}

/// Direct conjugate-Poisson evaluation
///   arg a(w) = -(1/pi) int f(s) (s - Re w) / |s - w|^2 ds
/// from samples of f = log|a| on a uniform grid (trapezoid weights).
inline double conjugate_poisson_arg(const std::function<double(double)>& logmod,
                                    double s_lo, double s_hi, int n, cplx w) {
    const double ds = (s_hi - s_lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = s_lo + i * ds;
        const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
        const double dx = s - w.real();
        const double dy = w.imag();
        acc += wgt * logmod(s) * dx / (dx * dx + dy * dy);
    }
    return -acc * ds / 3.141592653589793238462643383279502884;
}

}  // namespace oracles
