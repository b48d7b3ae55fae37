// Acceptance suite: every criterion prints one pass/fail line with the
// measured values; the exit status is the number of failed criteria.
// argv[1] (optional) is the CLI binary, exercised by the determinism check.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ncclab/bounds.hpp"
#include "ncclab/dirac.hpp"
#include "ncclab/experiments.hpp"
#include "ncclab/krein.hpp"
#include "ncclab/outer.hpp"
#include "ncclab/rng.hpp"
#include "ncclab/serialize.hpp"
#include "ncclab/verify.hpp"

using namespace ncclab;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(int criterion, const std::string& label, bool pass,
            const std::string& detail) {
    std::printf("criterion %2d %-4s %-28s %s\n", criterion,
                pass ? "PASS" : "FAIL", label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// 1. zero coefficient reproduces the free matrix to machine precision
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double x = 0.25 + 1.05 * i;
            const cplx k(-3.0 + 0.7 * j, 0.35 * j);
            const Transfer2 t = integrate_krein(Potential::zero(), k, x);
            const cplx e = gap_phase(k, x);
            worst = std::max(worst,
                             std::abs(t.a_star() - e) / std::max(1.0, std::abs(e)));
            worst = std::max(worst, std::abs(t.a() - cplx(1.0)));
            worst = std::max(worst, std::abs(t.b()));
            worst = std::max(worst, std::abs(t.b_star()));
        }
    }
    const double dt = seconds_since(t0);
    report(1, "free_case", worst < 1e-14 && dt < 1.0,
           fmt("max residual %.2e on a 100-point grid, %.2f s", worst, dt));
}

// 2. determinant and real-axis unimodularity across random smooth bumps
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20250607);
    double worst_det = 0.0, worst_uni = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Potential p = Potential::bump(
            BumpShape::SmoothCompact, rng.uniform(0.4, 1.6),
            rng.uniform(0.5, 2.0), cplx(0.2, 0.0) + 0.75 * rng.unit_disc());
        const double x_end = p.support().hi;
        for (int i = 0; i < 64; ++i) {
            const bool axis = (i % 2 == 0);
            const cplx k(-4.0 + 8.0 * i / 63.0,
                         axis ? 0.0 : rng.uniform(0.05, 6.0 / x_end));
            const Transfer2 t = integrate_krein(p, k, x_end);
            const cplx want = gap_phase(k, x_end);
            worst_det = std::max(
                worst_det, std::abs(t.entries.det() - want) / std::abs(want));
            if (axis)
                worst_uni = std::max(worst_uni, std::abs(std::norm(t.a()) -
                                                         std::norm(t.b()) - 1.0));
        }
    }
    const double dt = seconds_since(t0);
    report(2, "identity_suite",
           worst_det < 1e-9 && worst_uni < 1e-9 && dt < 30.0,
           fmt("max det residual %.2e, max unimodularity %.2e, %.1f s",
               worst_det, worst_uni, dt));
}

// 3. constant coefficient at k = 0: hyperbolic functions exactly
void criterion_3() {
    double worst = 0.0;
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        const Transfer2 t =
            integrate_krein(Potential::indicator(0.0, x), cplx(0.0), x);
        worst = std::max(worst, std::abs(t.a() - std::cosh(x)));
        worst = std::max(worst, std::abs(t.b() + std::sinh(x)));
    }
    report(3, "closed_form", worst < 1e-10, fmt("max abs error %.2e", worst));
}

// 4. the indicator trajectory: modulus floor and the top-anchor distance
void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    const Potential chi = Potential::indicator(0.0, 7.0);
    const ArgTrace tr = unwrapped_arg_along_ray(chi, 7.0, 2.0, 100.0);
    double min_mod = 1e300;
    for (const cplx v : tr.values) min_mod = std::min(min_mod, std::abs(v));
    const double top_dist = std::abs(tr.values.front() - cplx(1.0));
    const double dt = seconds_since(t0);
    const bool pass = min_mod >= 1.0 - 1e-6 && top_dist <= 0.05 && dt < 10.0;
    report(4, "figure2_trajectory", pass,
           fmt("min|z| %.9f, |z(100i+2)-1| = %.4f (needs <= 0.05), %.1f s",
               min_mod, top_dist, dt));
}

// 5. all five line symmetries and both half-line scalings
void criterion_5() {
    const SuiteResult s = suite_symmetries(555);
    report(5, "symmetry_suite", s.pass,
           fmt("max residual %.2e over 5 potentials, 32-point grids",
               s.details.empty() ? -1.0 : s.details[0].second));
}

// 6. sum rules and the quadratic scaling of the right side
void criterion_6() {
    const Potential base = Potential::standard_bump();
    const double kr = sum_rule(base, SumRuleMode::Krein).residual;
    const double dr = sum_rule(base, SumRuleMode::Dirac).residual;
    std::vector<double> deltas{0.4, 0.2, 0.1, 0.05}, rhs_vals;
    for (double d : deltas)
        rhs_vals.push_back(sum_rule(base.scaled(d), SumRuleMode::Dirac).rhs);
    const double slope = fit_loglog(deltas, rhs_vals).slope;
    const bool pass =
        kr < 1e-3 && dr < 1e-3 && std::abs(slope - 2.0) <= 0.05;
    report(6, "sum_rules", pass,
           fmt("residuals %.2e / %.2e, delta-slope %.3f", kr, dr, slope));
}

// 7. exact composition vs direct integration; truncated budget on overlaps
void criterion_7() {
    Rng rng(70707);
    const Potential b1 =
        Potential::bump(BumpShape::SmoothCompact, 0.5, 1.0, cplx(0.7, 0.2));
    const Potential b2 =
        Potential::bump(BumpShape::SmoothCompact, 0.5, 1.0, cplx(-0.4, 0.6));
    double worst_exact = 0.0;
    for (double r_gap : {4.0, 16.0, 64.0}) {
        const double shift = b1.support().hi - b2.support().lo + r_gap;
        for (double xi : {0.5, 1.25, 2.0}) {
            const Transition g = glue_exact(b1, b2, shift, xi);
            const Transition d =
                transition_sum(SumPotential::of(b1, b2, shift), xi);
            worst_exact = std::max(worst_exact, std::abs(g.a - d.a));
            worst_exact = std::max(worst_exact, std::abs(g.b - d.b));
        }
    }
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Potential v1 =
            Potential::bump(BumpShape::SmoothCompact, rng.uniform(-0.5, 0.5),
                            rng.uniform(1.2, 4.0), 0.8 * rng.unit_disc());
        const Potential v2 =
            Potential::bump(BumpShape::SmoothCompact, rng.uniform(-0.5, 0.5),
                            rng.uniform(1.2, 4.0), 0.8 * rng.unit_disc());
        const double R = rng.uniform(0.4, 3.0);
        const double xi = rng.uniform(-2.0, 2.0);
        const GlueApprox ga = glue_approx(v1, v2, R, xi);
        const Transition direct =
            transition_sum(SumPotential::of(v1, v2, R), xi);
        if (std::abs(ga.a - direct.a) > ga.eps_star + 1e-9) ++violations;
        if (std::abs(ga.b - direct.b) > ga.eps_star + 1e-9) ++violations;
    }
    report(7, "gluing", worst_exact < 1e-8 && violations == 0,
           fmt("max exact diff %.2e, %d budget violations in 100 overlaps",
               worst_exact, violations));
}

// 8. half-line correspondence against the line transition
void criterion_8() {
    const Potential q =
        Potential::bump(BumpShape::SmoothCompact, 1.0, 1.0, cplx(0.7, 0.35));
    double worst = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double xi = 0.25 + (2.0 - 0.25) * i / 11.0;
        const Transition t = transition(q, xi);
        const BridgeValues bv = bridge_transition(q, cplx(xi, 0.0));
        worst = std::max(worst, std::abs(bv.a - t.a));
    }
    report(8, "bridge", worst < 1e-7, fmt("max |bridge - direct| %.2e", worst));
}

// 9. outer extension of boundary data at interior points
void criterion_9() {
    const Potential p = Potential::standard_bump();
    const LogModulusTable table = krein_log_modulus_table(p, -40.0, 40.0, 6401);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const cplx k(-2.0 + 4.0 * i / 9.0, 0.5 + 0.3 * i);
        const cplx via_outer = outer_extend(table, k);
        const cplx direct = limits_ab(p, k).a;
        worst = std::max(worst, std::abs(via_outer - direct) / std::abs(direct));
    }
    report(9, "outer_representation", worst < 1e-3,
           fmt("max relative diff %.2e at 10 points", worst));
}

// 10. logarithmic growth of the piled-bump argument
void criterion_10(OuterArgEngine& engine) {
    const auto t0 = std::chrono::steady_clock::now();
    const DecoupledGrowthReport rep =
        run_decoupled_growth(engine, {8, 16, 32, 64, 128}, 0.5, 1.0, 5, 2);
    const double dt = seconds_since(t0);
    const bool pass =
        rep.fit.slope > 0.0 && rep.fit.correlation > 0.99 && dt < 300.0;
    report(10, "log_growth", pass,
           fmt("alpha %.3f, corr %.5f, route diff %.1e, %.1f s", rep.fit.slope,
               rep.fit.correlation, rep.max_route_diff, dt));
}

// 11. quadratic scaling of the sample argument in the damping
void criterion_11() {
    std::vector<double> deltas{0.2, 0.4, 0.8}, args;
    for (double d : deltas) {
        const DiracSampleReport rep =
            run_dirac_sample(Potential::standard_bump(), 64, d, 512.0, 0.5,
                             1.0, 5, 1e-10, 2);
        args.push_back(rep.max_abs_arg);
    }
    const double slope = fit_loglog(deltas, args).slope;
    report(11, "delta_sq_scaling", std::abs(slope - 2.0) <= 0.2,
           fmt("log-log slope %.3f over deltas {0.2, 0.4, 0.8} at nu=64",
               slope));
}

// 12. strictly increasing cutoff oscillations across the assembled samples
void criterion_12() {
    const AssembleReport rep = assemble_and_probe(
        Potential::standard_bump(), {{16, 0.3}, {64, 0.5}, {256, 0.8}}, 0.5,
        1.0, 5, 1e-10, 2);
    bool increasing = rep.samples.size() == 3;
    double min_ratio = 1e300;
    for (std::size_t n = 1; n < rep.samples.size(); ++n) {
        const double ratio =
            rep.samples[n].oscillation / rep.samples[n - 1].oscillation;
        min_ratio = std::min(min_ratio, ratio);
        if (ratio < 1.2) increasing = false;
    }
    report(12, "cutoff_oscillation", increasing && rep.min_abs_a >= 1.0 - 1e-9,
           fmt("oscillations %.4f -> %.4f -> %.4f, min step ratio %.2f",
               rep.samples[0].oscillation, rep.samples[1].oscillation,
               rep.samples[2].oscillation, min_ratio));
}

// 13. flat L2 norms against a growing maximal set
void criterion_13(OuterArgEngine& engine) {
    const WeakTypeReport rep =
        weak_type_failure_table(engine, {8, 16, 32, 64}, 21, 2);
    bool l2_flat = true, fractions_ok = true;
    for (const WeakTypeRow& row : rep.rows) {
        if (std::abs(row.l2 - rep.rows[0].l2) > 0.10 * rep.rows[0].l2)
            l2_flat = false;
        if (row.fraction < 0.9) fractions_ok = false;
    }
    report(13, "weak_type_table", l2_flat && fractions_ok,
           fmt("l2 %.4f..%.4f, min fraction %.2f, threshold alpha/2=%.3f",
               rep.rows.front().l2, rep.rows.back().l2,
               [&] {
                   double m = 1.0;
                   for (const auto& r : rep.rows) m = std::min(m, r.fraction);
                   return m;
               }(),
               0.5 * rep.alpha_fit));
}

// 14. the appendix inequality suites with frozen constants
void criterion_14() {
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteResult s = suite_bounds(140000);
    const double dt = seconds_since(t0);
    std::string detail = "";
    for (const auto& [k, v] : s.details) detail += fmt("%s=%g ", k.c_str(), v);
    report(14, "appendix_suites", s.pass && dt < 60.0,
           detail + fmt(", %.1f s", dt));
}

// 15. byte-identical reruns and thread-count independence through the CLI
void criterion_15(const std::string& cli) {
    if (cli.empty()) {
        report(15, "determinism", false, "no CLI binary path provided");
        return;
    }
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ncclab_acceptance";
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);
    auto run = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const int rc1 = run("verify --seed 7 --out " + (dir / "v1").string());
    const int rc2 = run("verify --seed 7 --out " + (dir / "v2").string());
    bool pass = rc1 == 0 && rc2 == 0;
    std::string detail;
    if (!pass) {
        detail = fmt("verify exits %d / %d", rc1, rc2);
    } else {
        const std::string r1 =
            read_text_file((dir / "v1" / "verify_report.json").string());
        const std::string r2 =
            read_text_file((dir / "v2" / "verify_report.json").string());
        const bool verify_same = !r1.empty() && r1 == r2;

        const std::string cfg_path = (dir / "growth.json").string();
        write_text_file(cfg_path,
                        "{\"experiment\":\"growth\",\"params\":{\"nu_list\":[8,16],"
                        "\"n_xi\":3}}\n");
        const int g1 = run("growth --config " + cfg_path + " --threads 1 --out " +
                           (dir / "g1").string());
        const int g2 = run("growth --config " + cfg_path + " --threads 2 --out " +
                           (dir / "g2").string());
        bool threads_same = g1 == 0 && g2 == 0;
        if (threads_same) {
            const std::string t1 =
                read_text_file((dir / "g1" / "growth_report.json").string());
            const std::string t2 =
                read_text_file((dir / "g2" / "growth_report.json").string());
            threads_same = !t1.empty() && t1 == t2;
        }
        pass = verify_same && threads_same;
        detail = fmt("verify reruns identical: %s; threads 1 vs 2 identical: %s",
                     verify_same ? "yes" : "no", threads_same ? "yes" : "no");
    }
    report(15, "determinism", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    std::printf("acceptance suite\n");
    const std::string cli = argc > 1 ? argv[1] : "";
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    OuterArgEngine engine(Potential::standard_bump());
    criterion_10(engine);
    criterion_11();
    criterion_12();
    criterion_13(engine);
    criterion_14();
    criterion_15(cli);
    std::printf("%d criteria failed\n", g_failures);
    return g_failures;
}
