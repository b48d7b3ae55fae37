#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace ncclab {

/// Adaptive Simpson with recursion on the standard |S2 - S1|/15 estimate.
/// Tolerances are absolute per call; callers convert from relative targets.
namespace detail {

template <typename F>
double simpson(F&& f, double a, double fa, double b, double fb, double m,
               double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F&& f, double a, double fa, double b, double fb,
                            double m, double fm, double whole, double tol,
                            int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                                depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                                depth - 1);
}

}  // namespace detail

template <typename F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol,
                          int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol,
                                        max_depth);
}

/// Integrate over [a, b] split at the given interior breakpoints. Keeps the
/// adaptive rule away from kinks (support edges, grid nodes).
template <typename F>
double integrate_piecewise(F&& f, double a, double b,
                           const std::vector<double>& breaks, double abs_tol) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    const double per = abs_tol / static_cast<double>(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate_adaptive(f, pts[i], pts[i + 1], per);
    return total;
}

/// Composite Simpson with a fixed even cell count; the workhorse for
/// test-side oracles where an implementation-independent route is wanted.
template <typename F>
double simpson_fixed(F&& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace ncclab
