#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ncclab/bounds.hpp"
#include "ncclab/dirac.hpp"
#include "ncclab/krein.hpp"
#include "ncclab/outer.hpp"
#include "ncclab/rng.hpp"

namespace ncclab {

/// One named invariant suite outcome; details are (label, value) pairs in a
/// fixed order so reports serialize byte-identically for a fixed seed.
struct SuiteResult {
    std::string name;
    bool pass{false};
    std::vector<std::pair<std::string, double>> details;

    void record(const std::string& label, double value) {
        details.emplace_back(label, value);
    }
};

namespace verify_detail {

inline Potential random_smooth_bump(Rng& rng, bool complex_amp = true,
                                    double lo = 0.0) {
    const double width = rng.uniform(0.4, 2.0);
    const double center = lo + rng.uniform(0.2, 1.5) + width / 2.0;
    cplx amp = complex_amp ? cplx(0.3, 0.0) + 0.7 * rng.unit_disc()
                           : cplx(rng.uniform(0.3, 1.0), 0.0);
    return Potential::bump(BumpShape::SmoothCompact, center, width, amp);
}

}  // namespace verify_detail

/// Zero coefficient: X = diag(e^{ikx}, 1) to machine precision on a grid.
inline SuiteResult suite_free_case() {
    SuiteResult r;
    r.name = "free_case";
    double worst = 0.0;
    for (int xi = 0; xi < 10; ++xi) {
        for (int xj = 0; xj < 10; ++xj) {
            const double x = 0.3 + 1.2 * xi;
            const cplx k(-2.0 + 0.5 * xj, 0.25 * xj);
            const Transfer2 t = integrate_krein(Potential::zero(), k, x);
            const cplx expect = gap_phase(k, x);
            const double scale = std::max(1.0, std::abs(expect));
            worst = std::max(worst, std::abs(t.a_star() - expect) / scale);
            worst = std::max(worst, std::abs(t.a() - cplx(1.0)));
            worst = std::max(worst, std::abs(t.b()));
            worst = std::max(worst, std::abs(t.b_star()));
        }
    }
    r.record("max_residual", worst);
    r.pass = worst < 1e-14;
    return r;
}

/// Constant coefficient at k = 0: a = cosh x, b = -sinh x.
inline SuiteResult suite_closed_form() {
    SuiteResult r;
    r.name = "closed_form_cosh";
    double worst = 0.0;
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        const Potential one = Potential::indicator(0.0, x);
        const Transfer2 t = integrate_krein(one, cplx(0.0), x);
        worst = std::max(worst, std::abs(t.a() - std::cosh(x)));
        worst = std::max(worst, std::abs(t.b() + std::sinh(x)));
        worst = std::max(worst, std::abs(t.a_star() - std::cosh(x)));
        worst = std::max(worst, std::abs(t.b_star() + std::sinh(x)));
    }
    r.record("max_abs_error", worst);
    r.pass = worst < 1e-10;
    return r;
}

/// Determinant and real-axis unimodularity across random smooth bumps.
inline SuiteResult suite_identities(std::uint64_t seed) {
    SuiteResult r;
    r.name = "transfer_identities";
    Rng rng(seed);
    double worst_det = 0.0, worst_unimod = 0.0, worst_domination = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Potential p = verify_detail::random_smooth_bump(rng);
        const double x_end = p.support().hi;
        for (int i = 0; i < 64; ++i) {
            // half the grid on the axis, half in the strip Im k x <= 8
            const bool axis = (i % 2 == 0);
            const cplx k(-4.0 + 8.0 * i / 63.0,
                         axis ? 0.0 : rng.uniform(0.05, 8.0 / x_end));
            const Transfer2 t = integrate_krein(p, k, x_end);
            const cplx want = gap_phase(k, x_end);
            worst_det = std::max(
                worst_det, std::abs(t.entries.det() - want) / std::abs(want));
            if (axis) {
                worst_unimod = std::max(
                    worst_unimod,
                    std::abs(std::norm(t.a()) - std::norm(t.b()) - 1.0));
                worst_unimod = std::max(worst_unimod, star_residual(p, t));
            } else {
                worst_domination =
                    std::max(worst_domination, 1.0 + std::norm(t.b()) -
                                                   std::norm(t.a()));
            }
        }
    }
    r.record("max_det_residual", worst_det);
    r.record("max_unimodularity_residual", worst_unimod);
    r.record("max_domination_violation", worst_domination);
    r.pass = worst_det < 1e-9 && worst_unimod < 1e-9 && worst_domination < 1e-8;
    return r;
}

/// The five line symmetries of (a, b, r) plus the two half-line scalings.
inline SuiteResult suite_symmetries(std::uint64_t seed) {
    SuiteResult r;
    r.name = "symmetries";
    Rng rng(seed);
    const double tol = 2e-12;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Potential q = verify_detail::random_smooth_bump(rng);
        const double mu = rng.uniform(0.5, 2.0);
        const double shift = rng.uniform(-3.0, 3.0);
        const double beta = rng.uniform(-2.0, 2.0);
        const cplx zeta = rng.unit_circle();
        for (int i = 0; i < 32; ++i) {
            const double xi = -3.0 + 6.0 * i / 31.0;
            const Transition t = transition(q, xi, tol);
            // dilation: r(xi, mu q(mu x)) = r(xi/mu, q)
            const Transition td = transition(q.dilated(mu), xi, tol);
            worst = std::max(worst,
                             std::abs(td.r - transition(q, xi / mu, tol).r));
            // conjugation: r(xi, conj q) = conj r(-xi, q)
            const Transition tc = transition(q.conjugated(), xi, tol);
            worst = std::max(
                worst, std::abs(tc.r - std::conj(transition(q, -xi, tol).r)));
            // translation: r(xi, q(.-l)) = r(xi, q) e^{-i xi l}
            const Transition tt = transition(q.translated(shift), xi, tol);
            worst = std::max(worst,
                             std::abs(tt.r - t.r * expi_prod(-xi, shift)));
            // modulation: r(xi, e^{-i beta x} q) = r(xi + beta, q)
            const Transition tm = transition(q.modulated(-beta), xi, tol);
            worst = std::max(worst,
                             std::abs(tm.r - transition(q, xi + beta, tol).r));
            // rotation: r(xi, zeta q) = zeta r(xi, q), a unchanged
            const Transition tr = transition(q.rotated(zeta), xi, tol);
            worst = std::max(worst, std::abs(tr.r - zeta * t.r));
            worst = std::max(worst, std::abs(tr.a - t.a));
        }
    }
    // half-line scalings of the fundamental matrix
    Rng rng2(seed + 1);
    for (int trial = 0; trial < 5; ++trial) {
        const Potential a = verify_detail::random_smooth_bump(rng2, true, 0.0);
        const double x = a.support().hi * rng2.uniform(0.5, 1.0);
        const double ell = rng2.uniform(-2.0, 2.0);
        const double mu = rng2.uniform(0.5, 2.0);
        for (int i = 0; i < 32; ++i) {
            const cplx k(-2.0 + 4.0 * i / 31.0, (i % 3) * 0.4);
            // modulation covariance: diag(e^{-i l x},1) X(x,k,A) = X(x,k-l,A e^{ilx})
            const Transfer2 lhs = integrate_krein(a, k, x, tol);
            const Transfer2 rhs =
                integrate_krein(a.modulated(ell), k - ell, x, tol);
            const cplx ph = expi_prod(-ell, x);
            worst = std::max(worst, std::abs(ph * lhs.a_star() - rhs.a_star()));
            worst = std::max(worst, std::abs(ph * lhs.b_star() - rhs.b_star()));
            worst = std::max(worst, std::abs(lhs.a() - rhs.a()));
            worst = std::max(worst, std::abs(lhs.b() - rhs.b()));
            // dilation covariance: X(mu x, k/mu, A) = X(x, k, A^{(mu)})
            const Transfer2 lhs2 = integrate_krein(a, k / mu, mu * x, tol);
            const Transfer2 rhs2 = integrate_krein(a.dilated(mu), k, x, tol);
            worst = std::max(worst, operator_norm(lhs2.entries - rhs2.entries));
        }
    }
    r.record("max_symmetry_residual", worst);
    r.pass = worst < 1e-9;
    return r;
}

/// Sum rules on both sides plus the quadratic small-coefficient scaling.
inline SuiteResult suite_sum_rules() {
    SuiteResult r;
    r.name = "sum_rules";
    const Potential base = Potential::standard_bump();
    const SumRule k_rule = sum_rule(base, SumRuleMode::Krein);
    const SumRule d_rule = sum_rule(base, SumRuleMode::Dirac);
    r.record("krein_residual", k_rule.residual);
    r.record("dirac_residual", d_rule.residual);
    std::vector<double> deltas{0.4, 0.2, 0.1, 0.05}, rhs_vals;
    for (double d : deltas)
        rhs_vals.push_back(sum_rule(base.scaled(d), SumRuleMode::Dirac).rhs);
    const LinearFit f = fit_loglog(deltas, rhs_vals);
    r.record("delta_scaling_slope", f.slope);
    r.pass = k_rule.residual < 1e-3 && d_rule.residual < 1e-3 &&
             std::abs(f.slope - 2.0) <= 0.05;
    return r;
}

/// Exact composition against direct integration, and the truncated
/// composition against its reported budget on overlapping cases.
inline SuiteResult suite_gluing(std::uint64_t seed) {
    SuiteResult r;
    r.name = "gluing";
    Rng rng(seed);
    double worst_exact = 0.0;
    const Potential b1 = verify_detail::random_smooth_bump(rng);
    const Potential b2 = verify_detail::random_smooth_bump(rng);
    const double clear = b1.support().hi - b2.support().lo;
    for (double R : {4.0, 16.0, 64.0}) {
        const double gap = R + std::max(0.0, clear);
        for (double xi : {0.5, 1.0, 2.0}) {
            const Transition g = glue_exact(b1, b2, gap, xi);
            const Transition d =
                transition_sum(SumPotential::of(b1, b2, gap), xi);
            worst_exact = std::max(worst_exact, std::abs(g.a - d.a));
            worst_exact = std::max(worst_exact, std::abs(g.b - d.b));
        }
    }
    int budget_violations = 0;
    double max_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double w1 = rng.uniform(1.0, 4.0), w2 = rng.uniform(1.0, 4.0);
        const Potential v1 = Potential::bump(BumpShape::SmoothCompact,
                                             rng.uniform(-0.5, 0.5), w1,
                                             0.8 * rng.unit_disc());
        const Potential v2 = Potential::bump(BumpShape::SmoothCompact,
                                             rng.uniform(-0.5, 0.5), w2,
                                             0.8 * rng.unit_disc());
        const double R = rng.uniform(0.5, 3.0);
        const double xi = rng.uniform(-2.0, 2.0);
        const GlueApprox ga = glue_approx(v1, v2, R, xi);
        const Transition direct =
            transition_sum(SumPotential::of(v1, v2, R), xi);
        const double err = std::abs(ga.a - direct.a);
        if (ga.eps_star > 0.0)
            max_ratio = std::max(max_ratio, err / ga.eps_star);
        if (err > ga.eps_star + 1e-9) ++budget_violations;
    }
    r.record("max_exact_diff", worst_exact);
    r.record("budget_violations", budget_violations);
    r.record("max_err_over_budget", max_ratio);
    r.pass = worst_exact < 1e-8 && budget_violations == 0;
    return r;
}

/// Half-line correspondence against the direct line transition.
inline SuiteResult suite_bridge() {
    SuiteResult r;
    r.name = "bridge";
    const Potential q =
        Potential::bump(BumpShape::SmoothCompact, 1.0, 1.0, cplx(0.7, 0.35));
    double worst = 0.0, worst_unimod = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double xi = 0.25 + (2.0 - 0.25) * i / 14.0;
        const Transition t = transition(q, xi);
        const BridgeValues bv = bridge_transition(q, cplx(xi, 0.0));
        worst = std::max(worst, std::abs(bv.a - t.a));
        if (bv.b) worst = std::max(worst, std::abs(*bv.b - t.b));
        worst_unimod = std::max(
            worst_unimod,
            std::abs(std::norm(bv.a) - 1.0 -
                     (bv.b ? std::norm(*bv.b) : std::norm(t.b))));
    }
    r.record("max_bridge_diff", worst);
    r.record("max_unimodularity_residual", worst_unimod);
    r.pass = worst < 1e-7 && worst_unimod < 1e-7;
    return r;
}

/// Outer extension of boundary data against directly computed values.
inline SuiteResult suite_outer_representation() {
    SuiteResult r;
    r.name = "outer_representation";
    const Potential p = Potential::standard_bump();
    const LogModulusTable table =
        krein_log_modulus_table(p, -40.0, 40.0, 6401);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const cplx k(-2.0 + 4.0 * i / 9.0, 0.5 + 0.35 * i);
        const cplx via_outer = outer_extend(table, k);
        const cplx direct = limits_ab(p, k).a;
        worst = std::max(worst, std::abs(via_outer - direct) / std::abs(direct));
    }
    r.record("max_relative_diff", worst);
    r.pass = worst < 1e-3;
    return r;
}

/// Randomized matrix-inequality suites plus the frozen-constant guards.
inline SuiteResult suite_bounds(std::uint64_t seed) {
    SuiteResult r;
    r.name = "bounds";
    Rng rng(seed);
    int product_fails = 0, recursive_fails = 0, sequence_fails = 0;
    for (int t = 0; t < 1000; ++t) {
        auto trial =
            random_trial(rng, 1 + static_cast<int>(rng.uniform() * 16), 1e-3);
        if (!check_product_perturbation(trial).holds) ++product_fails;
    }
    for (int t = 0; t < 1000; ++t) {
        auto trial = random_trial(
            rng, 2 + static_cast<int>(rng.uniform() * 15), 1e-4, 0.5);
        if (!check_recursive_perturbation(trial).holds) ++recursive_fails;
    }
    for (int t = 0; t < 1000; ++t) {
        const auto chk = check_sequence_bound(rng.uniform(-2.0, 2.0),
                                              0.1 + 2.0 * rng.uniform(), 3, 40,
                                              rng);
        if (!chk.holds) ++sequence_fails;
    }
    const Potential base = Potential::standard_bump();
    bool tail_ok = true, stab_ok = true, l1_ok = true;
    for (double xi : {0.0, 1.0, 2.0}) {
        std::vector<double> grid;
        for (int i = 0; i < 16; ++i) grid.push_back(-0.2 + 1.5 * i / 15.0);
        if (!check_jost_tail(base, xi, grid).holds) tail_ok = false;
    }
    const Potential v =
        Potential::bump(BumpShape::SmoothCompact, 0.4, 0.7, cplx(0.4, 0.25));
    const StabilityReport stab = check_jost_stability(base, v, 0.8);
    stab_ok = stab.holds;
    const auto l1 = check_krein_l1(Potential::indicator(0.0, 7.0),
                                   {cplx(0.0), cplx(1.0), cplx(2.0, 0.0),
                                    cplx(0.5, 1.0), cplx(3.0, 10.0)},
                                   {0.5, 1.0, 3.0, 7.0});
    l1_ok = l1.holds;
    r.record("product_fails", product_fails);
    r.record("recursive_fails", recursive_fails);
    r.record("sequence_fails", sequence_fails);
    r.record("jost_tail_ok", tail_ok ? 1.0 : 0.0);
    r.record("stability_slope", stab.slope);
    r.record("krein_l1_max", l1.lhs);
    r.pass = product_fails == 0 && recursive_fails == 0 && sequence_fails == 0 &&
             tail_ok && stab_ok && l1_ok;
    return r;
}

/// The invariant battery behind the verify command.
inline std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
    std::vector<SuiteResult> out;
    out.push_back(suite_free_case());
    out.push_back(suite_closed_form());
    out.push_back(suite_identities(seed));
    out.push_back(suite_symmetries(seed + 1000));
    out.push_back(suite_sum_rules());
    out.push_back(suite_gluing(seed + 2000));
    out.push_back(suite_bridge());
    out.push_back(suite_outer_representation());
    out.push_back(suite_bounds(seed + 3000));
    return out;
}

}  // namespace ncclab
