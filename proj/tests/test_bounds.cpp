#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ncclab/bounds.hpp"
#include "oracles.hpp"

using namespace ncclab;

TEST_CASE("product perturbation bound", "[bounds]") {
    Rng rng(11);

    // all deltas zero: lhs exactly zero
    PerturbationTrial quiet = random_trial(rng, 8, 0.0);
    const BoundCheck q = check_product_perturbation(quiet);
    CHECK(q.lhs == 0.0);
    CHECK(q.holds);

    // single factor: lhs = ||delta|| <= eps <= rhs
    PerturbationTrial single = random_trial(rng, 1, 1e-3);
    const BoundCheck s = check_product_perturbation(single);
    CHECK(s.lhs <= single.eps * (1.0 + 1e-12));
    CHECK(s.holds);

    // randomized battery
    int fails = 0;
    for (int t = 0; t < 1000; ++t) {
        auto trial =
            random_trial(rng, 1 + static_cast<int>(rng.uniform() * 16), 1e-3);
        if (!check_product_perturbation(trial).holds) ++fails;
    }
    CHECK(fails == 0);
}

TEST_CASE("recursive perturbation bound", "[bounds]") {
    Rng rng(22);

    // single factor: Y_1 = X_1 exactly
    PerturbationTrial single = random_trial(rng, 1, 1e-4, 0.5);
    const BoundCheck s = check_recursive_perturbation(single);
    CHECK(s.holds);

    // zero deltas: exact equality down the whole ladder
    PerturbationTrial quiet = random_trial(rng, 12, 0.0, 0.5);
    const BoundCheck q = check_recursive_perturbation(quiet);
    CHECK(q.lhs == 0.0);
    CHECK(q.holds);

    int fails = 0;
    for (int t = 0; t < 1000; ++t) {
        auto trial = random_trial(
            rng, 2 + static_cast<int>(rng.uniform() * 15), 1e-4, 0.5);
        if (!check_recursive_perturbation(trial).holds) ++fails;
    }
    CHECK(fails == 0);
}

TEST_CASE("sequence absorption bound", "[bounds]") {
    Rng rng(33);

    // c = 0: the sequence can never exceed its start
    const BoundCheck zero_c = check_sequence_bound(1.5, 0.0, 3, 30, rng);
    CHECK(zero_c.holds);
    CHECK(zero_c.lhs <= 1.5 * (1.0 + 1e-12));

    // zero start: everything comes from the additive tail
    const BoundCheck from_zero = check_sequence_bound(0.0, 1.0, 3, 40, rng);
    CHECK(from_zero.holds);
    const double geo = 1.0 / (1.0 - std::exp(-1.0));
    CHECK(from_zero.rhs ==
          Catch::Approx(geo * std::exp(geo) * std::exp(-3.0)).epsilon(1e-12));

    int fails = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto chk = check_sequence_bound(
            rng.uniform(-2.0, 2.0), 0.1 + 2.0 * rng.uniform(), 3, 40, rng);
        if (!chk.holds) ++fails;
    }
    CHECK(fails == 0);
}

TEST_CASE("jost tail envelope", "[bounds]") {
    const Potential zero = Potential::zero();
    std::vector<double> grid{-1.0, 0.0, 1.0};
    CHECK(check_jost_tail(zero, 1.0, grid).holds);

    const Potential q = Potential::standard_bump();
    std::vector<double> fine;
    for (int i = 0; i < 16; ++i) fine.push_back(-0.3 + 1.6 * i / 15.0);
    for (double xi : {0.0, 1.0, 2.0}) {
        const BoundCheck chk = check_jost_tail(q, xi, fine);
        CHECK(chk.holds);
    }
    // past the support the left side is zero to integrator tolerance
    const auto past = jost_states_at(q, 1.0, {1.5, 2.0});
    for (const Mat2& y : past)
        CHECK(operator_norm(y - Mat2::identity()) < 1e-12);
}

TEST_CASE("jost stability scaling", "[bounds]") {
    const Potential q = Potential::standard_bump();
    const Potential v =
        Potential::bump(BumpShape::SmoothCompact, 0.45, 0.8, cplx(0.5, 0.2));

    // v = 0: no response beyond the two routes' own integration tolerance
    const Transition t0 = transition(q, 0.8);
    const Transition t_same =
        transition_sum(SumPotential::of(q, v, 0.0, 0.0), 0.8);
    CHECK(std::abs(t_same.a - t0.a) < 5e-10);

    const StabilityReport rep = check_jost_stability(q, v, 0.8);
    CHECK(rep.holds);
    CHECK(rep.slope >= 0.9);

    // tiny perturbation against the first-order response: difference
    // quotients at two small scales agree to ten percent
    const double eps1 = 1e-5, eps2 = 5e-6;
    const Transition p1 = transition_sum(SumPotential::of(q, v, 0.0, eps1), 0.8);
    const Transition p2 = transition_sum(SumPotential::of(q, v, 0.0, eps2), 0.8);
    const cplx slope1 = (p1.a - t0.a) / eps1;
    const cplx slope2 = (p2.a - t0.a) / eps2;
    CHECK(std::abs(slope1 - slope2) <= 0.1 * std::abs(slope2) + 1e-12);
}

TEST_CASE("krein transfer L1 guard", "[bounds]") {
    // zero coefficient: the norm never exceeds 1 in the closed upper half-plane
    const auto zero_chk =
        check_krein_l1(Potential::zero(), {cplx(0.0), cplx(1.0, 2.0)}, {1.0, 5.0});
    CHECK(zero_chk.holds);
    CHECK(zero_chk.lhs <= 1.0 + 1e-12);

    // indicator family on a real grid holds with the frozen constant
    std::vector<cplx> ks;
    for (int i = 0; i <= 12; ++i) ks.push_back(cplx(-3.0 + 0.5 * i, 0.0));
    const Potential chi = Potential::indicator(0.0, 7.0);
    const auto chk = check_krein_l1(chi, ks, {1.0, 3.5, 7.0});
    CHECK(chk.holds);

    // doubling the amplitude at k = 0 stays within twice the log-cap
    const Potential chi2 =
        Potential::bump(BumpShape::Indicator, 3.5, 7.0, cplx(2.0, 0.0));
    const Transfer2 t1 = integrate_krein(chi, cplx(0.0), 7.0);
    const Transfer2 t2 = integrate_krein(chi2, cplx(0.0), 7.0);
    CHECK(std::log(operator_norm(t2.entries)) <=
          2.0 * std::log(operator_norm(t1.entries)) * 1.001 + 1e-9);
}

TEST_CASE("operator norm closed form", "[bounds]") {
    Rng rng(44);
    for (int t = 0; t < 200; ++t) {
        Mat2 m{rng.unit_disc(), rng.unit_disc(), rng.unit_disc(), rng.unit_disc()};
        const double nrm = operator_norm(m);
        // oracle: power iteration on M^H M
        cplx v0 = 1.0, v1 = 0.37;
        double lambda = 0.0;
        for (int it = 0; it < 200; ++it) {
            // w = M v
            const cplx w0 = m.m00 * v0 + m.m01 * v1;
            const cplx w1 = m.m10 * v0 + m.m11 * v1;
            // u = M^H w
            const cplx u0 = std::conj(m.m00) * w0 + std::conj(m.m10) * w1;
            const cplx u1 = std::conj(m.m01) * w0 + std::conj(m.m11) * w1;
            const double nn = std::sqrt(std::norm(u0) + std::norm(u1));
            if (nn == 0.0) break;
            lambda = nn / std::sqrt(std::norm(v0) + std::norm(v1));
            const double inv = 1.0 / nn;
            v0 = u0 * inv;
            v1 = u1 * inv;
        }
        CHECK(nrm == Catch::Approx(std::sqrt(lambda)).margin(1e-8));
    }
}
