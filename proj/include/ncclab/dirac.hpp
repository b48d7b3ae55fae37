#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ncclab/integrator.hpp"
#include "ncclab/krein.hpp"
#include "ncclab/mat2.hpp"
#include "ncclab/phase.hpp"
#include "ncclab/potential.hpp"

namespace ncclab {

/// Frozen stability constant in the L1 perturbation bound
/// |a(q+v) - a(q)| <= ||v||_1 exp(C (||q||_1 + ||v||_1)); calibrated once on
/// the bump families used here and kept as a regression value.
inline constexpr double kJostStabilityC = 2.0;

/// Jost normalization Y = E^{-1} T_+ at a position x: solves
///   Y' = [[0, conj(q) e^{i xi x}], [q e^{-i xi x}, 0]] Y,  Y(+inf) = I,
/// integrated right to left. det Y = 1 exactly (traceless coefficient).
struct JostState {
    Mat2 y;
    double x{0.0};
    double xi{0.0};
};

/// Transition coefficients at one real frequency: |a|^2 - |b|^2 = 1, r = b/a.
struct Transition {
    cplx a{1.0};
    cplx b{0.0};
    cplx r{0.0};
};

/// (a, b, r) sampled on a frequency grid.
struct ScatteringCoeffs {
    std::vector<double> xi;
    std::vector<cplx> a, b, r;
};

namespace detail {

/// Left-edge Y for q restricted to the window [win_lo, win_hi]; the window
/// boundaries become exact segment cuts (used by the truncated composition).
/// Works for Potential and for the overlapping SumPotential overlay.
template <typename P>
Mat2 jost_left_edge(const P& q, double xi, double win_lo, double win_hi,
                    double tol, IntegrationStats* stats) {
    IntegrationStats local;
    IntegrationStats* st = stats ? stats : &local;

    const std::vector<Interval> regions = q.support_regions();
    std::vector<std::pair<double, double>> segs;
    for (const Interval& r : regions) {
        const double lo = std::max(win_lo, r.lo);
        const double hi = std::min(win_hi, r.hi);
        if (hi > lo) segs.emplace_back(lo, hi);
    }
    if (segs.empty()) return Mat2::identity();

    const std::vector<double> breaks = q.breakpoints();
    const double seg_tol = tol / static_cast<double>(2 * segs.size() + 2);

    Mat2 y = Mat2::identity();
    // sweep right to left; Y is constant across gaps (the coefficient is 0)
    for (auto seg_it = segs.rbegin(); seg_it != segs.rend(); ++seg_it) {
        const auto [lo, hi] = *seg_it;
        std::vector<double> pts{lo};
        for (double bpt : breaks)
            if (bpt > lo + 1e-14 && bpt < hi - 1e-14) pts.push_back(bpt);
        pts.push_back(hi);
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = pts.size() - 1; i-- > 0;) {
            const double a = pts[i], b = pts[i + 1];
            // factor the carrier phase at the segment's left edge through a
            // full-precision reduction so huge offsets do not cost digits
            const cplx carrier = expi_prod(-xi, a);
            auto coeff = [&q, xi, a, carrier](double x) -> Mat2 {
                const cplx v = q(x);
                const cplx ph = carrier * expi(-xi * (x - a));
                const cplx lower = v * ph;
                return {cplx(0.0), std::conj(lower), lower, cplx(0.0)};
            };
            const double amp = max_abs_on(q, a, b);
            const long n0 = initial_cells(b - a, std::abs(xi),
                                          q.frequency_hint(), amp);
            const Mat2 seg = segment_transfer(coeff, a, b, n0, seg_tol,
                                              /*reverse=*/true, st);
            // det(Y-step) = 1 exactly for the traceless coefficient
            const double resid = std::abs(seg.det() - cplx(1.0));
            st->det_drift = std::max(st->det_drift, resid);
            if (resid > tol * 10.0)
                throw IntegrationError("unimodularity residual exceeds tolerance",
                                       resid);
            y = seg * y;
        }
    }
    return y;
}

}  // namespace detail

/// Y at the left support edge (beyond which it is constant), with the right
/// edge anchored at the identity; the tail beyond the declared support is
/// below the declared truncation budget.
inline JostState integrate_jost(const Potential& q, double xi,
                                double tol = 1e-10,
                                IntegrationStats* stats = nullptr) {
    if (!std::isfinite(xi))
        throw std::invalid_argument("integrate_jost: xi must be finite");
    if (q.is_zero()) return {Mat2::identity(), 0.0, xi};
    const Interval s = q.support();
    const Mat2 y = detail::jost_left_edge(q, xi, s.lo, s.hi, tol, stats);
    return {y, s.lo, xi};
}

/// Y at each requested position (ascending), for tail/stability diagnostics.
inline std::vector<Mat2> jost_states_at(const Potential& q, double xi,
                                        const std::vector<double>& positions,
                                        double tol = 1e-10) {
    std::vector<Mat2> out(positions.size());
    const Interval s = q.support();
    for (std::size_t i = 0; i < positions.size(); ++i)
        out[i] = (positions[i] >= s.hi)
                     ? Mat2::identity()
                     : detail::jost_left_edge(q, xi, positions[i], s.hi, tol,
                                              nullptr);
    return out;
}

/// Reads (a, b) off the left-edge Y = [[conj a, -conj b], [-b, a]].
inline Transition transition_from(const JostState& j) {
    Transition t;
    t.a = j.y.m11;
    t.b = -j.y.m10;
    if (std::abs(t.a) < 1.0 - 1e-6)
        throw IntegrationError("transition: |a| < 1 signals integration failure",
                               1.0 - std::abs(t.a));
    t.r = t.b / t.a;
    return t;
}

inline Transition transition(const Potential& q, double xi, double tol = 1e-10,
                             IntegrationStats* stats = nullptr) {
    return transition_from(integrate_jost(q, xi, tol, stats));
}

/// Direct transition of a pointwise overlay (overlapping supports welcome);
/// the oracle route for the truncated composition's error budget.
inline Transition transition_sum(const SumPotential& q, double xi,
                                 double tol = 1e-10) {
    if (q.is_zero()) return Transition{};
    const Interval s = q.support();
    const Mat2 y = detail::jost_left_edge(q, xi, s.lo, s.hi, tol, nullptr);
    Transition t;
    t.a = y.m11;
    t.b = -y.m10;
    t.r = t.b / t.a;
    return t;
}

inline ScatteringCoeffs scan_transition(const Potential& q,
                                        const std::vector<double>& xi_grid,
                                        double tol = 1e-10) {
    ScatteringCoeffs sc;
    sc.xi = xi_grid;
    sc.a.resize(xi_grid.size());
    sc.b.resize(xi_grid.size());
    sc.r.resize(xi_grid.size());
    for (std::size_t i = 0; i < xi_grid.size(); ++i) {
        const Transition t = transition(q, xi_grid[i], tol);
        sc.a[i] = t.a;
        sc.b[i] = t.b;
        sc.r[i] = t.r;
    }
    return sc;
}

/// Composition law for Q = v1(x) + v2(x - R) with supp v1 left of the shifted
/// supp v2 (exact for disjoint supports):
///   a(Q) = a1 a2 + b1 conj(b2) e^{i xi R}
///   b(Q) = conj(a2) b1 + a1 b2 e^{-i xi R}
/// The phase is reduced mod 2 pi in extended precision.
inline Transition glue_exact(const Transition& t1, const Transition& t2,
                             double R, double xi) {
    const cplx phase = expi_prod(xi, R);
    Transition t;
    t.a = t1.a * t2.a + t1.b * std::conj(t2.b) * phase;
    t.b = std::conj(t2.a) * t1.b + t1.a * t2.b * std::conj(phase);
    t.r = t.b / t.a;
    return t;
}

/// Potential-level wrapper; rejects overlapping supports.
inline Transition glue_exact(const Potential& v1, const Potential& v2, double R,
                             double xi, double tol = 1e-10) {
    if (!v1.is_zero() && !v2.is_zero() &&
        v1.support().hi > v2.support().lo + R + 1e-12)
        throw std::invalid_argument(
            "glue_exact: supports overlap after the shift; use glue_approx");
    return glue_exact(transition(v1, xi, tol), transition(v2, xi, tol), R, xi);
}

struct GlueApprox {
    cplx a{1.0};
    cplx b{0.0};
    double eps_star{0.0};  // reported error budget
};

/// The same combination computed from both factors truncated to |x| < R/2,
/// with the tail-driven budget
///   eps*(R) = (tail1(R/2) + tail2(R/2)) * exp(C (||v1||_1 + ||v2||_1)).
inline GlueApprox glue_approx(const Potential& v1, const Potential& v2,
                              double R, double xi, double tol = 1e-10) {
    if (R < 0.0) throw std::invalid_argument("glue_approx: R >= 0");
    auto truncated_transition = [&](const Potential& v) -> Transition {
        if (v.is_zero()) return Transition{};
        Transition t;
        const Mat2 y =
            detail::jost_left_edge(v, xi, -R / 2.0, R / 2.0, tol, nullptr);
        t.a = y.m11;
        t.b = -y.m10;
        t.r = (std::abs(t.a) > 0.0) ? t.b / t.a : cplx(0.0);
        return t;
    };
    const Transition t1 = truncated_transition(v1);
    const Transition t2 = truncated_transition(v2);
    const Transition g = glue_exact(t1, t2, R, xi);
    const double tails = v1.tail_mass(R / 2.0) + v2.tail_mass(R / 2.0);
    const double l1s = v1.l1_norm() + v2.l1_norm();
    GlueApprox out;
    out.a = g.a;
    out.b = g.b;
    out.eps_star = tails * std::exp(kJostStabilityC * l1s);
    return out;
}

/// Krein-side coefficient pair for the correspondence with the Dirac setup:
/// from q on the line, fold the two half-lines onto R+ as
///   A_plus(x) = -1/2 conj(q(x/2)),   A_minus(x) = 1/2 q(-x/2).
inline std::pair<Potential, Potential> krein_pair(const Potential& q) {
    const Potential a_plus = q.conjugated().dilated(0.5).rotated(-1.0);
    const Potential a_minus = reflect(q).dilated(0.5);
    return {a_plus, a_minus};
}

struct BridgeValues {
    cplx a{1.0};                 // Dirac a at spectral parameter 2k
    std::optional<cplx> b{};     // Dirac b at 2 xi, only on the real axis
};

/// Dirac coefficients through the two half-line Krein systems:
///   a(2k, q) = a_+(k) a_-(k) - b_+(k) b_-(k),            Im k >= 0,
///   b(2 xi, q) = a_-(xi) conj(b_+(xi)) - b_-(xi) conj(a_+(xi)),  xi real.
/// Note the factor of two: callers working on the Dirac frequency axis pass
/// k = xi_dirac / 2 (see bridge_transition).
inline BridgeValues krein_dirac_bridge(const Potential& q, cplx k,
                                       double tol = 1e-10) {
    if (k.imag() < 0.0)
        throw std::invalid_argument("krein_dirac_bridge: need Im k >= 0");
    const auto [a_plus_pot, a_minus_pot] = krein_pair(q);
    const KreinCoeffs plus = limits_ab(a_plus_pot, k, tol);
    const KreinCoeffs minus = limits_ab(a_minus_pot, k, tol);
    BridgeValues out;
    out.a = plus.a * minus.a - plus.b * minus.b;
    if (k.imag() == 0.0)
        out.b = minus.a * std::conj(plus.b) - minus.b * std::conj(plus.a);
    return out;
}

/// Same values addressed by the Dirac frequency (the factor-2 map applied).
inline BridgeValues bridge_transition(const Potential& q, cplx xi_dirac,
                                      double tol = 1e-10) {
    return krein_dirac_bridge(q, xi_dirac / 2.0, tol);
}

}  // namespace ncclab
