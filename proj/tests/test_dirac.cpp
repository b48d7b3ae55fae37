#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ncclab/dirac.hpp"
#include "ncclab/rng.hpp"
#include "oracles.hpp"

using namespace ncclab;

TEST_CASE("jost normalization basics", "[dirac]") {
    // free line: Y = I everywhere
    const JostState free = integrate_jost(Potential::zero(), 1.3);
    CHECK(operator_norm(free.y - Mat2::identity()) == 0.0);

    // sweep stays within the tail envelope ||Y - I|| <= tail e^{C tail}
    const Potential q = Potential::standard_bump();
    std::vector<double> grid;
    for (int i = 0; i <= 12; ++i) grid.push_back(-0.2 + 1.4 * i / 12.0);
    const auto ys = jost_states_at(q, 0.9, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double tail = 0.0;
        if (grid[i] < 1.0)
            tail = oracles::midpoint_integral(
                [&](double x) { return std::abs(q(x)); },
                std::max(grid[i], 0.0), 1.0, 20000);
        const double lhs = operator_norm(ys[i] - Mat2::identity());
        CHECK(lhs <= 2.0 * tail * std::exp(2.0 * tail) + 1e-9);
    }

    // symmetric real bump at xi = 0: the left edge is unimodular
    const JostState j0 = integrate_jost(q, 0.0);
    CHECK(std::abs(std::norm(j0.y.m11) - std::norm(j0.y.m10) - 1.0) < 1e-10);
}

TEST_CASE("transition coefficients", "[dirac]") {
    const Transition free = transition(Potential::zero(), 0.7);
    CHECK(free.a == cplx(1.0));
    CHECK(free.b == cplx(0.0));
    CHECK(free.r == cplx(0.0));

    const Potential q =
        Potential::bump(BumpShape::SmoothCompact, 0.5, 1.0, cplx(0.8, 0.4));
    for (double xi : {-1.5, 0.0, 0.8, 2.2}) {
        const Transition t = transition(q, xi);
        CHECK(std::abs(std::norm(t.a) - std::norm(t.b) - 1.0) < 1e-10);
        CHECK(std::abs(t.a) >= 1.0);
        CHECK(std::abs(t.r) < 1.0);
        CHECK(std::abs(t.r - t.b / t.a) < 1e-15);
    }

    // rotation: b picks up the factor, a does not
    const cplx zeta = std::polar(1.0, 1.1);
    for (double xi : {0.4, 1.3}) {
        const Transition t = transition(q, xi);
        const Transition tz = transition(q.rotated(zeta), xi);
        CHECK(std::abs(tz.a - t.a) < 1e-10);
        CHECK(std::abs(tz.b - zeta * t.b) < 1e-10);
    }

    // translation: r gains e^{-i xi l}
    const double ell = 37.5;
    for (double xi : {0.4, 1.3}) {
        const Transition t = transition(q, xi);
        const Transition tt = transition(q.translated(ell), xi);
        CHECK(std::abs(tt.r - t.r * expi_prod(-xi, ell)) < 1e-9);
    }
}

TEST_CASE("exact composition", "[dirac]") {
    const Potential b = Potential::standard_bump();
    const Transition t1 = transition(b, 1.0);

    // an absent second factor changes nothing
    const Transition same = glue_exact(t1, Transition{}, 50.0, 1.0);
    CHECK(std::abs(same.a - t1.a) < 1e-15);
    CHECK(std::abs(same.b - t1.b) < 1e-15);

    // two identities compose to the identity
    const Transition id = glue_exact(Transition{}, Transition{}, 10.0, 0.5);
    CHECK(id.a == cplx(1.0));
    CHECK(id.b == cplx(0.0));

    // two copies at separation 20 against direct integration
    for (double xi : {0.35, 1.0, 1.7}) {
        const Transition g = glue_exact(b, b, 20.0, xi);
        const Transition d = transition_sum(SumPotential::of(b, b, 20.0), xi);
        CHECK(std::abs(g.a - d.a) < 1e-8);
        CHECK(std::abs(g.b - d.b) < 1e-8);
    }

    // overlap rejection
    CHECK_THROWS_AS(glue_exact(b, b, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("truncated composition with reported budget", "[dirac]") {
    const Potential b = Potential::standard_bump();

    // disjoint compact supports, R large: budget zero, equals exact route
    const GlueApprox far = glue_approx(b, b, 20.0, 1.0);
    CHECK(far.eps_star == 0.0);
    const Transition exact = glue_exact(b, b, 20.0, 1.0);
    CHECK(std::abs(far.a - exact.a) < 1e-12);

    // absent second factor
    const GlueApprox solo = glue_approx(b, Potential::zero(), 6.0, 1.0);
    const Transition alone = transition(b, 1.0);
    CHECK(std::abs(solo.a - alone.a) < 1e-12);

    // genuinely overlapping wide bumps: error within the reported budget
    Rng rng(5150);
    for (int trial = 0; trial < 25; ++trial) {
        const Potential v1 =
            Potential::bump(BumpShape::SmoothCompact, rng.uniform(-0.4, 0.4),
                            rng.uniform(1.5, 4.0), 0.8 * rng.unit_disc());
        const Potential v2 =
            Potential::bump(BumpShape::SmoothCompact, rng.uniform(-0.4, 0.4),
                            rng.uniform(1.5, 4.0), 0.8 * rng.unit_disc());
        const double R = rng.uniform(0.5, 2.5);
        const double xi = rng.uniform(-2.0, 2.0);
        const GlueApprox ga = glue_approx(v1, v2, R, xi);
        const Transition direct =
            transition_sum(SumPotential::of(v1, v2, R), xi);
        CHECK(std::abs(ga.a - direct.a) <= ga.eps_star + 1e-9);
        CHECK(std::abs(ga.b - direct.b) <= ga.eps_star + 1e-9);
    }
}

TEST_CASE("half-line correspondence", "[dirac]") {
    // zero potential
    CHECK(std::abs(krein_dirac_bridge(Potential::zero(), cplx(0.4, 0.2)).a -
                   cplx(1.0)) < 1e-14);

    // right-half-line bump: the folded pair reproduces the line coefficients
    const Potential q =
        Potential::bump(BumpShape::SmoothCompact, 1.0, 1.0, cplx(0.7, 0.35));
    for (int i = 0; i < 8; ++i) {
        const double xi = 0.25 + (2.0 - 0.25) * i / 7.0;
        const Transition t = transition(q, xi);
        const BridgeValues bv = bridge_transition(q, cplx(xi, 0.0));
        CHECK(std::abs(bv.a - t.a) < 1e-7);
        REQUIRE(bv.b.has_value());
        CHECK(std::abs(*bv.b - t.b) < 1e-7);
        CHECK(std::abs(std::norm(bv.a) - std::norm(*bv.b) - 1.0) < 1e-7);
    }

    // a two-sided potential still satisfies the axis identity
    const Potential two_sided =
        Potential::bump(BumpShape::SmoothCompact, -0.3, 1.4, cplx(0.5, -0.6));
    for (double xi : {0.5, 1.0}) {
        const BridgeValues bv = bridge_transition(two_sided, cplx(xi, 0.0));
        const Transition t = transition(two_sided, xi);
        CHECK(std::abs(bv.a - t.a) < 1e-7);
        CHECK(std::abs(*bv.b - t.b) < 1e-7);
    }

    CHECK_THROWS_AS(krein_dirac_bridge(q, cplx(0.0, -0.5)),
                    std::invalid_argument);
}

TEST_CASE("all five symmetries pointwise", "[dirac]") {
    Rng rng(808);
    const Potential q = Potential::bump(BumpShape::SmoothCompact,
                                        rng.uniform(0.2, 0.8),
                                        rng.uniform(0.6, 1.4), 0.8 * rng.unit_disc());
    const double mu = 1.6, shift = -2.2, beta = 0.9;
    const cplx zeta = std::polar(1.0, -0.7);
    const double tol = 2e-12;
    for (int i = 0; i < 8; ++i) {
        const double xi = -2.0 + 4.0 * i / 7.0;
        const Transition t = transition(q, xi, tol);
        CHECK(std::abs(transition(q.dilated(mu), xi, tol).r -
                       transition(q, xi / mu, tol).r) < 1e-9);
        CHECK(std::abs(transition(q.conjugated(), xi, tol).r -
                       std::conj(transition(q, -xi, tol).r)) < 1e-9);
        CHECK(std::abs(transition(q.translated(shift), xi, tol).r -
                       t.r * expi_prod(-xi, shift)) < 1e-9);
        CHECK(std::abs(transition(q.modulated(-beta), xi, tol).r -
                       transition(q, xi + beta, tol).r) < 1e-9);
        CHECK(std::abs(transition(q.rotated(zeta), xi, tol).r - zeta * t.r) <
              1e-9);
    }
}

TEST_CASE("scan emits a consistent grid", "[dirac]") {
    const Potential q = Potential::standard_bump();
    std::vector<double> grid;
    for (int i = 0; i <= 16; ++i) grid.push_back(-2.0 + 4.0 * i / 16.0);
    const ScatteringCoeffs sc = scan_transition(q, grid);
    REQUIRE(sc.xi.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(std::norm(sc.a[i]) - std::norm(sc.b[i]) - 1.0) < 1e-8);
        CHECK(std::abs(sc.r[i] - sc.b[i] / sc.a[i]) < 1e-12);
        CHECK(std::abs(sc.a[i]) >= 1.0 - 1e-8);
    }
}
