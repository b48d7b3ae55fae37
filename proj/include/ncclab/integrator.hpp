#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ncclab/mat2.hpp"

namespace ncclab {

/// Thrown when a transfer-matrix integration cannot reach the requested
/// tolerance within its cell budget; carries the residual actually achieved.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double achieved_residual)
        : std::runtime_error(what + " (achieved residual " +
                             std::to_string(achieved_residual) + ")"),
          achieved(achieved_residual) {}
    double achieved;
};

struct IntegrationStats {
    long cells{0};
    double richardson_error{0.0};   // max accepted Richardson estimate
    double det_drift{0.0};          // accumulated per-segment relative det drift
};

namespace detail {

/// One pass of the two-point Gauss (4th-order) Magnus scheme with n uniform
/// cells over [a, b]. `coeff` returns the 2x2 coefficient matrix at a point.
/// With reverse = true the product is the inverse transfer (right to left).
template <typename CoeffFn>
Mat2 magnus_pass(CoeffFn&& coeff, double a, double b, long n, bool reverse) {
    static const double kRoot3 = std::sqrt(3.0);
    const double h = (b - a) / static_cast<double>(n);
    const double c1 = 0.5 - kRoot3 / 6.0;
    const double c2 = 0.5 + kRoot3 / 6.0;
    const double w2 = kRoot3 * h * h / 12.0;
    Mat2 x = Mat2::identity();
    for (long i = 0; i < n; ++i) {
        const long j = reverse ? (n - 1 - i) : i;
        const double x0 = a + static_cast<double>(j) * h;
        const Mat2 m1 = coeff(x0 + c1 * h);
        const Mat2 m2 = coeff(x0 + c2 * h);
        Mat2 omega = (0.5 * h) * (m1 + m2) + w2 * (m2 * m1 - m1 * m2);
        if (reverse) omega = omega * cplx(-1.0);
        x = expm(omega) * x;
    }
    return x;
}

}  // namespace detail

/// Transfer matrix across [a, b] for X' = M(x) X, doubling the cell count
/// until the Richardson estimate ||X_2n - X_n|| / 15 drops below
/// tol * max(1, ||X_2n||). Returns X_2n (never the extrapolant: the per-cell
/// exponentials preserve det X exactly up to the coefficient freezing).
template <typename CoeffFn>
Mat2 segment_transfer(CoeffFn&& coeff, double a, double b, long n_init,
                      double tol, bool reverse, IntegrationStats* stats,
                      long cell_budget = (1L << 22)) {
    if (!(b > a)) return Mat2::identity();
    long n = std::max<long>(2, n_init);
    Mat2 prev = detail::magnus_pass(coeff, a, b, n, reverse);
    for (;;) {
        const long n2 = 2 * n;
        Mat2 cur = detail::magnus_pass(coeff, a, b, n2, reverse);
        const double err = operator_norm(cur - prev) / 15.0;
        const double scale = std::max(1.0, operator_norm(cur));
        if (err <= tol * scale) {
            if (stats) {
                stats->cells += n + n2;
                stats->richardson_error = std::max(stats->richardson_error, err);
            }
            return cur;
        }
        if (n2 >= cell_budget)
            throw IntegrationError("cell budget exhausted before tolerance",
                                   err / scale);
        n = n2;
        prev = cur;
    }
}

/// Initial cell count for a segment: enough cells that each resolves both the
/// spectral oscillation and the coefficient's own variation.
inline long initial_cells(double length, double k_scale, double freq_hint,
                          double amp_scale) {
    const double rate = k_scale + freq_hint + 2.0 * amp_scale + 1.0;
    const double want = length * rate / 0.5;
    return std::clamp<long>(static_cast<long>(std::ceil(want)), 4, 1L << 14);
}

}  // namespace ncclab
