#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ncclab/dirac.hpp"
#include "ncclab/fit.hpp"
#include "ncclab/krein.hpp"
#include "ncclab/mat2.hpp"
#include "ncclab/potential.hpp"
#include "ncclab/rng.hpp"

namespace ncclab {

/// Frozen constants for the runtime guards; calibrated once on the families
/// used here and committed as regression baselines.
inline constexpr double kJostTailC = 2.0;   // ||Y - I|| <= C tail e^{C tail}
inline constexpr double kKreinL1C = 1.1;    // ||X|| <= e^{C ||A||_1}

struct PerturbationTrial {
    std::vector<Mat2> x;      // factors, applied x[0] first
    std::vector<Mat2> delta;  // perturbations, same length (last unused by the
                              // recursive variant)
    double eps{0.0};          // max ||delta_j||
    double c{0.0};            // max ||x_j||
};

inline PerturbationTrial random_trial(Rng& rng, int n, double eps_scale,
                                      double diag_bias = 0.0) {
    if (n < 1 || n > 64)
        throw std::invalid_argument("random_trial: 1 <= n <= 64");
    PerturbationTrial t;
    for (int i = 0; i < n; ++i) {
        Mat2 x{rng.unit_disc(), rng.unit_disc(), rng.unit_disc(), rng.unit_disc()};
        x.m00 += diag_bias;
        x.m11 += diag_bias;
        Mat2 d{eps_scale * rng.unit_disc(), eps_scale * rng.unit_disc(),
               eps_scale * rng.unit_disc(), eps_scale * rng.unit_disc()};
        // scale so the operator norm stays within eps_scale
        const double dn = operator_norm(d);
        if (dn > eps_scale && dn > 0.0) d = d * cplx(eps_scale / dn);
        t.x.push_back(x);
        t.delta.push_back(d);
        t.eps = std::max(t.eps, operator_norm(d));
        t.c = std::max(t.c, operator_norm(x));
    }
    return t;
}

struct BoundCheck {
    double lhs{0.0};
    double rhs{0.0};
    bool holds{false};
};

/// Perturbed product bound: for every prefix n,
///   ||prod (X_j + D_j) - prod X_j|| <= (1 + 2C + 2eps)^n eps.
inline BoundCheck check_product_perturbation(const PerturbationTrial& t) {
    const double c1 = 1.0 + 2.0 * t.c + 2.0 * t.eps;
    Mat2 clean = Mat2::identity();
    Mat2 dirty = Mat2::identity();
    BoundCheck out;
    out.holds = true;
    for (std::size_t n = 0; n < t.x.size(); ++n) {
        clean = t.x[n] * clean;
        dirty = (t.x[n] + t.delta[n]) * dirty;
        const double lhs = operator_norm(dirty - clean);
        const double rhs =
            std::pow(c1, static_cast<double>(n + 1)) * t.eps;
        if (n + 1 == t.x.size()) {
            out.lhs = lhs;
            out.rhs = rhs;
        }
        if (lhs > rhs * (1.0 + 1e-12)) out.holds = false;
    }
    return out;
}

/// Recursive accumulation bound: with Y_{n+1} = X_{n+1} Y_n + D_n, Y_1 = X_1,
///   ||Y_n - X_n ... X_1|| <= eps (n-1) C^{n-1}   (requires C >= 1).
inline BoundCheck check_recursive_perturbation(const PerturbationTrial& t) {
    const double c = std::max(1.0, t.c);
    Mat2 psi = t.x[0];
    Mat2 y = t.x[0];
    BoundCheck out;
    out.holds = true;
    for (std::size_t n = 1; n < t.x.size(); ++n) {
        psi = t.x[n] * psi;
        y = t.x[n] * y + t.delta[n - 1];
        const double lhs = operator_norm(y - psi);
        const double rhs = t.eps * static_cast<double>(n) *
                           std::pow(c, static_cast<double>(n));
        out.lhs = lhs;
        out.rhs = rhs;
        if (lhs > rhs * (1.0 + 1e-12)) out.holds = false;
    }
    return out;
}

/// Sequence absorption bound: if |x_{n+1}| <= (1 + C e^{-n}) |x_n| + C e^{-n}
/// for n >= n0, then |x_n| <= (1 + C' e^{-n0}) |x_n0| + C' e^{-n0} with
/// C' = 1.582 C exp(1.582 C) (discrete Gronwall through the product bound).
inline BoundCheck check_sequence_bound(double x0, double c, int n0, int n_max,
                                       Rng& rng) {
    if (c < 0.0 || n0 < 0) throw std::invalid_argument("check_sequence_bound");
    const double geo = 1.0 / (1.0 - std::exp(-1.0));  // sum e^{-j} from n0, scaled
    const double c_prime = geo * c * std::exp(geo * c);
    std::vector<double> seq{std::abs(x0)};
    for (int n = n0; n < n_max; ++n) {
        const double theta = rng.uniform();  // admissible: any fraction of the bound
        const double phi = rng.uniform();
        const double next = theta * (1.0 + c * std::exp(-n)) * seq.back() +
                            phi * c * std::exp(-n);
        seq.push_back(next);
    }
    const double cap =
        (1.0 + c_prime * std::exp(-n0)) * std::abs(x0) + c_prime * std::exp(-n0);
    BoundCheck out;
    out.rhs = cap;
    out.holds = true;
    for (double v : seq) {
        out.lhs = std::max(out.lhs, v);
        if (v > cap * (1.0 + 1e-12)) out.holds = false;
    }
    return out;
}

/// Tail bound for the Jost normalization: at each grid point,
///   ||Y(x) - I|| <= C tail(x) e^{C tail(x)},  tail(x) = int_x^inf |q|.
inline BoundCheck check_jost_tail(const Potential& q, double xi,
                                  const std::vector<double>& x_grid,
                                  double tol = 1e-10) {
    const std::vector<Mat2> ys = jost_states_at(q, xi, x_grid, tol);
    const Interval s = q.support();
    BoundCheck out;
    out.holds = true;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        double tail = 0.0;
        if (x_grid[i] < s.hi) {
            auto f = [&q](double x) { return std::abs(q(x)); };
            tail = integrate_piecewise(f, std::max(x_grid[i], s.lo), s.hi,
                                       q.breakpoints(), 1e-10);
        }
        const double lhs = operator_norm(ys[i] - Mat2::identity());
        const double rhs = kJostTailC * tail * std::exp(kJostTailC * tail);
        out.lhs = std::max(out.lhs, lhs - rhs);
        out.rhs = std::max(out.rhs, rhs);
        if (lhs > rhs + tol * 100.0) out.holds = false;
    }
    return out;
}

struct StabilityReport {
    std::vector<double> v_l1;
    std::vector<double> delta_a;
    std::vector<double> delta_b;
    double slope{0.0};  // log-log slope of |delta a| against ||v||_1
    bool holds{false};  // slope >= 0.9 over >= 4 halvings
};

/// Linear response of (a, b) to halving perturbations: |a(q+v) - a(q)| must
/// scale at least linearly in ||v||_1.
inline StabilityReport check_jost_stability(const Potential& q,
                                            const Potential& v, double xi,
                                            int halvings = 5,
                                            double tol = 1e-11) {
    if (halvings < 4)
        throw std::invalid_argument("check_jost_stability: need >= 4 halvings");
    const Transition t0 = transition(q, xi, tol);
    const double v_l1 = v.l1_norm();
    StabilityReport rep;
    double scale = 1.0;
    for (int i = 0; i <= halvings; ++i) {
        const SumPotential qv = SumPotential::of(q, v, 0.0, scale);
        const Transition t = transition_sum(qv, xi, tol);
        rep.v_l1.push_back(scale * v_l1);
        rep.delta_a.push_back(std::abs(t.a - t0.a));
        rep.delta_b.push_back(std::abs(t.b - t0.b));
        scale *= 0.5;
    }
    const LinearFit f = fit_loglog(rep.v_l1, rep.delta_a);
    rep.slope = f.slope;
    rep.holds = f.slope >= 0.9;
    return rep;
}

/// Uniform transfer bound on the closed upper half-plane:
///   ||X(x, k, A)|| <= e^{C ||A||_1} with the frozen module constant.
inline BoundCheck check_krein_l1(const Potential& a,
                                 const std::vector<cplx>& k_samples,
                                 const std::vector<double>& x_samples,
                                 double tol = 1e-10) {
    const double cap = std::exp(kKreinL1C * a.l1_norm());
    BoundCheck out;
    out.rhs = cap;
    out.holds = true;
    for (cplx k : k_samples) {
        for (double x : x_samples) {
            const Transfer2 t = integrate_krein(a, k, x, tol);
            const double nrm = operator_norm(t.entries);
            out.lhs = std::max(out.lhs, nrm);
            if (nrm > cap * (1.0 + 1e-9)) out.holds = false;
        }
    }
    return out;
}

}  // namespace ncclab
