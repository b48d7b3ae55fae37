#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ncclab/integrator.hpp"
#include "ncclab/mat2.hpp"
#include "ncclab/phase.hpp"
#include "ncclab/potential.hpp"

namespace ncclab {

/// Fundamental matrix value X(x, k, A) of the first-order system
///   dX/dx = [[ik, -conj(A)], [-A, 0]] X,   X(0) = I,
/// laid out as X = [[a*, b*], [b, a]]. det X = e^{ikx} (the coefficient trace
/// is ik), |a|^2 - |b|^2 = 1 on real k, and |a| >= 1 in the closed upper
/// half-plane.
struct Transfer2 {
    Mat2 entries;
    double x{0.0};
    cplx k{0.0};

    cplx a() const { return entries.m11; }
    cplx b() const { return entries.m10; }
    cplx a_star() const { return entries.m00; }
    cplx b_star() const { return entries.m01; }
};

struct KreinCoeffs {
    cplx a{1.0};
    cplx b{0.0};
    cplx k{0.0};
    double x_cutoff{0.0};
};

namespace detail {

template <typename P>
double max_abs_on(const P& p, double a, double b) {
    double m = 0.0;
    const int n = 16;
    for (int i = 0; i <= n; ++i)
        m = std::max(m, std::abs(p(a + (b - a) * i / n)));
    return m;
}

}  // namespace detail

namespace detail {

/// Core transfer integration at arbitrary complex k (the entries are entire
/// in k); the public wrapper restricts to the closed upper half-plane, the
/// lower half-plane is reached only by the pointwise conj-k star check.
inline Transfer2 integrate_krein_any(const Potential& p, cplx k, double x_end,
                                     double tol, IntegrationStats* stats) {
    if (!(x_end >= 0.0))
        throw std::invalid_argument("integrate_krein: need x_end >= 0");
    // The system lives on the right half-line: any part of the coefficient
    // below x = 0 is simply never seen.

    IntegrationStats local_stats;
    IntegrationStats* st = stats ? stats : &local_stats;

    // clip support intervals to [0, x_end]
    const std::vector<Interval> regions = p.support_regions();
    std::vector<std::pair<double, double>> segs;
    for (const Interval& r : regions) {
        const double lo = std::max(0.0, r.lo);
        const double hi = std::min(x_end, r.hi);
        if (hi > lo) segs.emplace_back(lo, hi);
    }

    const std::vector<double> breaks = p.breakpoints();
    const double seg_tol =
        tol / static_cast<double>(2 * segs.size() + 2);

    Mat2 x_mat = Mat2::identity();
    double cursor = 0.0;
    auto coeff = [&p, k](double x) -> Mat2 {
        const cplx a = p(x);
        return {cplx(0.0, 1.0) * k, -std::conj(a), -a, cplx(0.0)};
    };

    auto advance_gap = [&](double to) {
        if (to > cursor) {
            x_mat = Mat2::diag(gap_phase(k, to - cursor), 1.0) * x_mat;
            cursor = to;
        }
    };

    const double k_scale = std::abs(k);
    for (const auto& [lo, hi] : segs) {
        advance_gap(lo);
        // split the region at interior breakpoints (grid nodes, edges)
        std::vector<double> pts{lo};
        for (double bpt : breaks)
            if (bpt > lo + 1e-14 && bpt < hi - 1e-14) pts.push_back(bpt);
        pts.push_back(hi);
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double a = pts[i], b = pts[i + 1];
            const double amp = max_abs_on(p, a, b);
            const long n0 =
                initial_cells(b - a, k_scale, p.frequency_hint(), amp);
            const Mat2 seg =
                segment_transfer(coeff, a, b, n0, seg_tol, false, st);
            // Determinant guard where cancellation leaves it meaningful: the
            // determinant equals e^{ik len} while the entries stay O(1), so
            // once Im k * len is large the subtraction is pure roundoff.
            const double eta_len = std::abs(k.imag()) * (b - a);
            if (eta_len <= 30.0) {
                const cplx want = gap_phase(k, b - a);
                const double nrm = operator_norm(seg);
                const double floor =
                    1e4 * 2.2e-16 * nrm * nrm / std::abs(want);
                const double resid = std::abs(seg.det() - want) / std::abs(want);
                st->det_drift = std::max(st->det_drift, resid);
                if (resid > std::max(tol * 10.0, floor))
                    throw IntegrationError(
                        "determinant residual exceeds tolerance", resid);
            }
            x_mat = seg * x_mat;
        }
        cursor = hi;
    }
    advance_gap(x_end);
    return Transfer2{x_mat, x_end, k};
}

}  // namespace detail

/// X(x_end, k, p) for Im k >= 0, by 4th-order Magnus cells over the support
/// regions and exact factors diag(e^{ik g}, 1) over the gaps. Cells double
/// until the Richardson estimate is below tol.
inline Transfer2 integrate_krein(const Potential& p, cplx k, double x_end,
                                 double tol = 1e-10,
                                 IntegrationStats* stats = nullptr) {
    if (k.imag() < 0.0)
        throw std::invalid_argument("integrate_krein: need Im k >= 0");
    return detail::integrate_krein_any(p, k, x_end, tol, stats);
}

struct KreinEntries {
    cplx a, b, a_star, b_star;
};

/// Entry extraction in the [[a*, b*], [b, a]] layout.
inline KreinEntries coefficients(const Transfer2& t) {
    return {t.a(), t.b(), t.a_star(), t.b_star()};
}

/// Residual of the star identity f*(k) = e^{ikx} conj(f(conj k)) for both
/// entries. Free on real k (conj k = k); for Im k > 0 it costs a second
/// integration at conj k.
inline double star_residual(const Potential& p, const Transfer2& t,
                            double tol = 1e-10) {
    const cplx phase = gap_phase(t.k, t.x);
    Transfer2 at_conj = t;
    if (t.k.imag() != 0.0)
        at_conj = detail::integrate_krein_any(p, std::conj(t.k), t.x, tol, nullptr);
    return std::abs(t.a_star() - phase * std::conj(at_conj.a())) +
           std::abs(t.b_star() - phase * std::conj(at_conj.b()));
}

/// Limit coefficients for a compactly supported A: (a, b) read off at the
/// right support edge, beyond which X changes only by the free phase.
inline KreinCoeffs limits_ab(const Potential& p, cplx k, double tol = 1e-10,
                             IntegrationStats* stats = nullptr) {
    if (p.is_zero()) return {1.0, 0.0, k, 0.0};
    const Interval s = p.support();
    if (!std::isfinite(s.hi))
        throw std::invalid_argument("limits_ab: unbounded support");
    const double cut = std::max(0.0, s.hi);
    const Transfer2 t = integrate_krein(p, k, cut, tol, stats);
    return {t.a(), t.b(), k, cut};
}

/// Ordered product of per-piece fundamental matrices interleaved with exact
/// gap factors diag(e^{ik g}, 1). pieces[0] is the leftmost; gaps[j] follows
/// pieces[j] (the last gap may be omitted).
inline Transfer2 group_compose(const std::vector<Transfer2>& pieces,
                               const std::vector<double>& gaps, cplx k) {
    if (pieces.empty())
        throw std::invalid_argument("group_compose: no pieces");
    if (gaps.size() + 1 != pieces.size() && gaps.size() != pieces.size())
        throw std::invalid_argument(
            "group_compose: need one gap per piece, last optional");
    Mat2 acc = Mat2::identity();
    double total_x = 0.0;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        if (std::abs(pieces[j].k - k) > 1e-12 * (1.0 + std::abs(k)))
            throw std::invalid_argument(
                "group_compose: piece evaluated at a different k");
        acc = pieces[j].entries * acc;
        total_x += pieces[j].x;
        if (j < gaps.size()) {
            if (gaps[j] < 0.0)
                throw std::invalid_argument("group_compose: negative gap");
            acc = Mat2::diag(gap_phase(k, gaps[j]), 1.0) * acc;
            total_x += gaps[j];
        }
    }
    return Transfer2{acc, total_x, k};
}

}  // namespace ncclab
