#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncclab/dirac.hpp"
#include "ncclab/fit.hpp"
#include "ncclab/krein.hpp"
#include "ncclab/outer.hpp"
#include "ncclab/parallel.hpp"
#include "ncclab/potential.hpp"

namespace ncclab {

/// Recorded in every experiment report. The half-line (transfer-matrix)
/// experiments use the L2-normalized smooth compactly supported template;
/// the whole-line sample experiments use a Gaussian wave packet instead,
/// because the chained composition stays perturbative only when each bump's
/// reflection spectrum is nearly disjoint from its neighbours', and the
/// compactly supported template's spectrum (stretched-exponential decay) is
/// far too wide for that.
inline const char* kBumpNote =
    "half-line bumps: L2-normalized smooth compact template "
    "c*exp(-1/(t(1-t))) on (0,1); line sample bumps: gaussian wave packet "
    "(sigma 1.5, amplitude 0.12) with near-disjoint reflection spectra";

/// The sample bump profile: reflection amplitude concentrated within about
/// one unit of reduced frequency, peak reflection ~0.45 delta.
inline Potential sample_wave_packet() {
    return Potential::bump(BumpShape::Gaussian, 0.0, 1.5, 0.12);
}

/// Transition coefficients of one damped sample bump as a function of the
/// reduced frequency w; the dilation and modulation laws make every bump of
/// every sample a frequency shift of this single profile:
///   a(xi, q_j) = a(nu (xi - xi_j), delta * base).
/// Near the spectral support the coefficients come from direct integration;
/// beyond it |b| sits below roundoff and |a| is an exact unimodular rotation
/// whose angle is the principal-value outer phase of the boundary modulus,
/// so arbitrarily long chains stay exactly on |a|^2 - |b|^2 = 1.
class SampleBumpFamily {
public:
    SampleBumpFamily(const Potential& base, double delta, double tol = 1e-10)
        : damped_(base.scaled(delta)), tol_(tol) {
        phase_table_ = make_log_modulus_table(
            [this](double s) {
                return std::log(std::abs(transition(damped_, s, tol_).a));
            },
            -(w_near_ + 3.0), w_near_ + 3.0, 2201);
    }

    Transition at(double w) const {
        const long long key = static_cast<long long>(std::llround(w * 1e9));
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        Transition t;
        if (std::abs(w) <= w_near_) {
            t = transition(damped_, w, tol_);
        } else {
            t.a = expi(outer_log(phase_table_, cplx(w, 0.0)).imag());
            t.b = 0.0;
            t.r = 0.0;
        }
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.emplace(key, t);
        return t;
    }

    const Potential& damped() const { return damped_; }
    double w_near() const { return w_near_; }

private:
    Potential damped_;
    double tol_;
    double w_near_{8.0};
    LogModulusTable phase_table_;
    mutable std::mutex mutex_;
    mutable std::map<long long, Transition> cache_;
};

// ---------------------------------------------------------------------------
// Piled-bump growth of the product argument
// ---------------------------------------------------------------------------

struct GrowthRow {
    int nu{0};
    double xi{0.0};
    double max_abs_arg{0.0};  // max over j in [nu/2, nu-1] of |arg O_j|
    int arg_max_j{0};
};

struct DecoupledGrowthReport {
    std::vector<int> nu_list;
    double xi_lo{0.5}, xi_hi{1.0};
    int n_xi{5};
    std::vector<GrowthRow> rows;
    std::vector<double> f_per_nu;  // max over the xi window
    LinearFit fit;                 // F(nu) ~ alpha log nu + beta
    double max_route_diff{0.0};
    double tol{1e-10};
    std::string bump_note{kBumpNote};
};

/// Growth of max_j |arg of the partial product| at k = xi + i/nu across a nu
/// ladder; the headline log-growth measurement.
inline DecoupledGrowthReport run_decoupled_growth(
    const OuterArgEngine& engine, const std::vector<int>& nu_list,
    double xi_lo = 0.5, double xi_hi = 1.0, int n_xi = 5, int threads = 1) {
    if (nu_list.empty())
        throw std::invalid_argument("run_decoupled_growth: empty nu list");
    for (std::size_t i = 1; i < nu_list.size(); ++i)
        if (nu_list[i] <= nu_list[i - 1])
            throw std::invalid_argument(
                "run_decoupled_growth: nu list must increase");
    if (!(xi_lo >= 0.5 - 1e-12) || !(xi_hi <= 1.0 + 1e-12) || !(xi_hi > xi_lo))
        throw std::invalid_argument(
            "run_decoupled_growth: xi window must sit inside [1/2, 1]");

    DecoupledGrowthReport rep;
    rep.nu_list = nu_list;
    rep.xi_lo = xi_lo;
    rep.xi_hi = xi_hi;
    rep.n_xi = n_xi;
    rep.tol = engine.options().tol;

    std::vector<double> xis(static_cast<std::size_t>(n_xi));
    for (int i = 0; i < n_xi; ++i)
        xis[static_cast<std::size_t>(i)] =
            (n_xi == 1) ? 0.5 * (xi_lo + xi_hi)
                        : xi_lo + (xi_hi - xi_lo) * i / (n_xi - 1);

    for (int nu : nu_list) {
        std::vector<GrowthRow> nu_rows(xis.size());
        parallel_for(xis.size(), threads, [&](std::size_t i) {
            const double xi = xis[i];
            const cplx k(xi, 1.0 / static_cast<double>(nu));
            const std::vector<double> prof = engine.profile_all(nu, k);
            GrowthRow row;
            row.nu = nu;
            row.xi = xi;
            for (int j = nu / 2; j <= nu - 1; ++j) {
                const double v = std::abs(prof[static_cast<std::size_t>(j)]);
                if (v > row.max_abs_arg) {
                    row.max_abs_arg = v;
                    row.arg_max_j = j;
                }
            }
            nu_rows[i] = row;
        });
        double f = 0.0;
        for (const GrowthRow& r : nu_rows) f = std::max(f, r.max_abs_arg);
        rep.f_per_nu.push_back(f);
        rep.rows.insert(rep.rows.end(), nu_rows.begin(), nu_rows.end());
    }

    if (nu_list.size() >= 2) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < nu_list.size(); ++i) {
            lx.push_back(std::log(static_cast<double>(nu_list[i])));
            ly.push_back(rep.f_per_nu[i]);
        }
        rep.fit = fit_linear(lx, ly);
    }
    rep.max_route_diff = engine.max_route_difference();
    return rep;
}

// ---------------------------------------------------------------------------
// Separated bumps: group product against direct integration
// ---------------------------------------------------------------------------

struct SeparatedRow {
    int ell{0};
    double diff{0.0};      // |direct - product| at the checked k, entrywise max
    double envelope{0.0};  // e^{-R Im k} C1^ell
};

struct SeparatedGrowthReport {
    int nu{0};
    double R{0.0};
    cplx k_check;
    std::vector<SeparatedRow> product_vs_direct;
    double c1{0.0};
    bool envelope_holds{false};
    std::vector<double> xi_samples;
    std::vector<double> m_lower_bounds;  // strong maximal probe per xi
    double tol{1e-10};
    std::string bump_note{kBumpNote};
};

/// Builds the separated train, checks the transfer product against direct
/// integration with the perturbation-lemma envelope, and probes the strong
/// maximal function near the window.
inline SeparatedGrowthReport run_separated_growth(const Potential& base, int nu,
                                                  double R, double xi_lo = 0.5,
                                                  double xi_hi = 1.0,
                                                  int n_xi = 5,
                                                  double im_k_check = 0.5,
                                                  double tol = 1e-10,
                                                  int threads = 1) {
    if (R < 0.0) throw std::invalid_argument("run_separated_growth: R >= 0");
    SeparatedGrowthReport rep;
    rep.nu = nu;
    rep.R = R;
    rep.tol = tol;

    const Potential q = build_separated(base, nu, R);
    const auto family = build_decoupled_family(base, nu);
    const double stride = static_cast<double>(nu) + R;
    const cplx k(0.5 * (xi_lo + xi_hi), im_k_check);
    rep.k_check = k;

    // per-piece transfer matrices and the lemma constant C1 = 1 + 2C + 2eps
    std::vector<Transfer2> pieces;
    double c_norm = 0.0;
    for (int j = 0; j < nu; ++j) {
        Transfer2 t = integrate_krein(family[static_cast<std::size_t>(j)], k,
                                      static_cast<double>(nu), tol);
        c_norm = std::max(c_norm, operator_norm(t.entries));
        pieces.push_back(t);
    }
    const double eps = std::exp(-R * k.imag()) * c_norm;
    rep.c1 = 1.0 + 2.0 * c_norm + 2.0 * eps;

    rep.envelope_holds = true;
    for (int ell = 1; ell <= nu; ++ell) {
        std::vector<Transfer2> prefix(pieces.begin(), pieces.begin() + ell);
        std::vector<double> gaps(static_cast<std::size_t>(ell), R);
        const Transfer2 prod = group_compose(prefix, gaps, k);
        const Transfer2 direct =
            integrate_krein(q, k, stride * static_cast<double>(ell), tol);
        SeparatedRow row;
        row.ell = ell;
        row.diff = operator_norm(direct.entries - prod.entries);
        row.envelope = std::exp(-R * k.imag()) * std::pow(rep.c1, ell);
        // quadrature floor: both routes carry ~tol-level error themselves
        if (row.diff > row.envelope + 100.0 * tol * (1.0 + c_norm))
            rep.envelope_holds = false;
        rep.product_vs_direct.push_back(row);
    }

    // strong maximal lower bound from the nontangential point k = xi + i/nu:
    // the unwrapped argument there, maximized over the sampled cutoffs
    std::vector<double> xis(static_cast<std::size_t>(n_xi));
    for (int i = 0; i < n_xi; ++i)
        xis[static_cast<std::size_t>(i)] =
            (n_xi == 1) ? 0.5 * (xi_lo + xi_hi)
                        : xi_lo + (xi_hi - xi_lo) * i / (n_xi - 1);
    rep.xi_samples = xis;
    rep.m_lower_bounds.assign(xis.size(), 0.0);
    const std::vector<double> cutoffs = {
        stride * std::floor(nu / 2.0), stride * std::floor(3.0 * nu / 4.0),
        stride * static_cast<double>(nu)};
    const double apex = 1.0 / static_cast<double>(nu);
    parallel_for(xis.size(), threads, [&](std::size_t i) {
        double best = 0.0;
        for (double cut : cutoffs) {
            auto value = [&](double eta) {
                return integrate_krein(q, cplx(xis[i], eta), cut, tol).a();
            };
            const double top = detail::auto_eta_max(value, 16.0);
            const ArgTrace tr = detail::trace_ray(value, xis[i], top, apex);
            best = std::max(best, std::abs(tr.arg_at_end()));
        }
        rep.m_lower_bounds[i] = best;
    });
    return rep;
}

// ---------------------------------------------------------------------------
// Dirac sample: damped, dilated, modulated bumps chained exactly
// ---------------------------------------------------------------------------

struct SampleRow {
    int m{0};
    double xi{0.0};
    double arg_value{0.0};  // continuously tracked arg a(xi, prefix through m)
};

struct DiracSampleReport {
    int nu{0};
    double delta{0.0}, rho{0.0};
    std::vector<SampleRow> rows;
    double max_abs_arg{0.0};
    double coeff_upper{0.0};       // max |a| - 1 over the chain
    double max_abs_b{0.0};
    double unimod_residual{0.0};   // max ||a|^2 - |b|^2 - 1|
    LinearFit arg_vs_logm;         // within-run growth over the prefix index
    double phase_budget{0.0};
    double tol{1e-10};
    std::string bump_note{kBumpNote};
};

/// Default bump spacing: comfortably beyond the wave packet's dilated
/// support diameter.
inline double default_sample_spacing(const Potential& base, int nu) {
    return 1.25 * base.support().length() * static_cast<double>(nu);
}

/// Chains the sample's bumps with exact gap phases, tracking the coefficient
/// bounds and the continuously unwrapped argument of a along the prefix
/// ladder m = 0 .. nu-1.
inline DiracSampleReport run_dirac_sample(const Potential& base, int nu,
                                          double delta, double rho,
                                          double xi_lo = 0.5,
                                          double xi_hi = 1.0, int n_xi = 5,
                                          double tol = 1e-10,
                                          int threads = 1) {
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("run_dirac_sample: need 0 < delta < 1");
    if (!(rho > base.support().length() * static_cast<double>(nu)))
        throw std::invalid_argument(
            "run_dirac_sample: rho must exceed the bump diameter");
    DiracSampleReport rep;
    rep.nu = nu;
    rep.delta = delta;
    rep.rho = rho;
    rep.tol = tol;

    const SampleBumpFamily family(base, delta, tol);

    std::vector<double> xis(static_cast<std::size_t>(n_xi));
    for (int i = 0; i < n_xi; ++i)
        xis[static_cast<std::size_t>(i)] =
            (n_xi == 1) ? 0.5 * (xi_lo + xi_hi)
                        : xi_lo + (xi_hi - xi_lo) * i / (n_xi - 1);

    struct PerXi {
        std::vector<SampleRow> rows;
        double coeff_upper{0.0}, max_abs_b{0.0}, unimod{0.0}, max_arg{0.0};
    };
    std::vector<PerXi> results(xis.size());

    parallel_for(xis.size(), threads, [&](std::size_t i) {
        const double xi = xis[i];
        PerXi acc;
        Transition chain;  // identity: a=1, b=0
        double arg = 0.0;
        for (int m = 0; m < nu; ++m) {
            // bump m in its local frame: a shift of the family profile
            const Transition t =
                family.at(static_cast<double>(nu) * xi - static_cast<double>(m));
            Transition next;
            if (m == 0) {
                next = t;
            } else {
                next = glue_exact(chain, t, rho * static_cast<double>(m), xi);
            }
            const double step = std::arg(next.a / chain.a);
            arg += step;
            chain = next;
            acc.coeff_upper = std::max(acc.coeff_upper, std::abs(chain.a) - 1.0);
            acc.max_abs_b = std::max(acc.max_abs_b, std::abs(chain.b));
            acc.unimod = std::max(
                acc.unimod,
                std::abs(std::norm(chain.a) - std::norm(chain.b) - 1.0));
            if (m >= nu / 2) {
                acc.rows.push_back({m, xi, arg});
                acc.max_arg = std::max(acc.max_arg, std::abs(arg));
            }
        }
        results[i] = std::move(acc);
    });

    std::vector<double> lm, la;
    for (std::size_t i = 0; i < xis.size(); ++i) {
        const PerXi& r = results[i];
        rep.rows.insert(rep.rows.end(), r.rows.begin(), r.rows.end());
        rep.max_abs_arg = std::max(rep.max_abs_arg, r.max_arg);
        rep.coeff_upper = std::max(rep.coeff_upper, r.coeff_upper);
        rep.max_abs_b = std::max(rep.max_abs_b, r.max_abs_b);
        rep.unimod_residual = std::max(rep.unimod_residual, r.unimod);
    }
    // within-run growth of the xi-maximal |arg| over the prefix index
    for (int m = nu / 2; m < nu; ++m) {
        double best = 0.0;
        for (const SampleRow& row : rep.rows)
            if (row.m == m) best = std::max(best, std::abs(row.arg_value));
        lm.push_back(std::log(static_cast<double>(m + 1)));
        la.push_back(best);
    }
    if (lm.size() >= 2) rep.arg_vs_logm = fit_linear(lm, la);
    // phase reduction: ~1e-28 per glue step at the largest reduced angle
    rep.phase_budget =
        static_cast<double>(nu) * 1e-28 *
        std::max(1.0, std::abs(xi_hi) * rho * static_cast<double>(nu));
    return rep;
}

// ---------------------------------------------------------------------------
// Sparse assembly and the cutoff oscillation
// ---------------------------------------------------------------------------

struct ScheduleEntry {
    int nu{0};
    double delta{0.0};
};

struct AssembleSampleResult {
    int nu{0};
    double delta{0.0}, rho{0.0}, offset{0.0};
    double oscillation{0.0};       // max_r |arg(cutoff r) - arg(cutoff 0)|
    double delta2_log_nu{0.0};
};

struct AssembleReport {
    std::vector<AssembleSampleResult> samples;
    std::vector<double> xi_samples;
    bool oscillations_strictly_increasing{false};
    double min_increase_ratio{0.0};
    double max_abs_a_minus_1{0.0};
    double min_abs_a{1.0};
    double max_abs_b{0.0};
    double phase_budget{0.0};
    double tol{1e-10};
    std::string bump_note{kBumpNote};
};

/// Assembles the scheduled samples at exact sparse offsets and measures the
/// per-sample oscillation of arg a across intra-sample cutoffs. The schedule
/// must make delta^2 log nu increase so each sample's oscillation dominates
/// the previous one.
inline AssembleReport assemble_and_probe(const Potential& base,
                                         const std::vector<ScheduleEntry>& schedule,
                                         double xi_lo = 0.5, double xi_hi = 1.0,
                                         int n_xi = 5, double tol = 1e-10,
                                         int threads = 1) {
    if (schedule.empty() || schedule.size() > 4)
        throw std::invalid_argument(
            "assemble_and_probe: schedule of 1..4 samples");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        const double prev = schedule[i - 1].delta * schedule[i - 1].delta *
                            std::log(static_cast<double>(schedule[i - 1].nu));
        const double cur = schedule[i].delta * schedule[i].delta *
                           std::log(static_cast<double>(schedule[i].nu));
        if (!(cur > prev))
            throw std::invalid_argument(
                "assemble_and_probe: delta^2 log nu must increase along the "
                "schedule");
    }

    AssembleReport rep;
    rep.tol = tol;

    // sparse offsets: each gap is 10x the support assembled so far
    const double bump_len = base.support().length();
    std::vector<double> rho(schedule.size());
    std::vector<double> offsets(schedule.size());
    double end = 0.0;
    double max_angle = 1.0;
    for (std::size_t n = 0; n < schedule.size(); ++n) {
        rho[n] = default_sample_spacing(base, schedule[n].nu);
        const double diam = rho[n] * (schedule[n].nu - 1) +
                            bump_len * static_cast<double>(schedule[n].nu);
        offsets[n] = (n == 0) ? bump_len * schedule[n].nu : end + 10.0 * end;
        end = offsets[n] + diam;
        max_angle = std::max(max_angle, std::abs(xi_hi) * end);
    }
    rep.phase_budget = 64.0 * 1e-28 * max_angle;
    if (rep.phase_budget > 1e-6)
        throw std::runtime_error(
            "assemble_and_probe: gap-phase precision budget exceeded");

    std::vector<double> xis(static_cast<std::size_t>(n_xi));
    for (int i = 0; i < n_xi; ++i)
        xis[static_cast<std::size_t>(i)] =
            (n_xi == 1) ? 0.5 * (xi_lo + xi_hi)
                        : xi_lo + (xi_hi - xi_lo) * i / (n_xi - 1);
    rep.xi_samples = xis;

    std::vector<std::unique_ptr<SampleBumpFamily>> families;
    for (const ScheduleEntry& s : schedule)
        families.push_back(
            std::make_unique<SampleBumpFamily>(base, s.delta, tol));

    struct PerXi {
        std::vector<double> oscillation;  // per sample
        double max_a{1.0}, min_a{1.0}, max_b{0.0};
    };
    std::vector<PerXi> results(xis.size());

    parallel_for(xis.size(), threads, [&](std::size_t i) {
        const double xi = xis[i];
        PerXi acc;
        acc.oscillation.assign(schedule.size(), 0.0);
        Transition chain;
        double arg = 0.0;
        bool first_bump = true;
        for (std::size_t n = 0; n < schedule.size(); ++n) {
            const int nu = schedule[n].nu;
            double arg_at_cut0 = 0.0;
            for (int m = 0; m < nu; ++m) {
                const Transition t = families[n]->at(
                    static_cast<double>(nu) * xi - static_cast<double>(m));
                Transition next;
                if (first_bump) {
                    next = t;
                    first_bump = false;
                } else {
                    const double place =
                        offsets[n] + rho[n] * static_cast<double>(m);
                    next = glue_exact(chain, t, place, xi);
                }
                arg += std::arg(next.a / chain.a);
                chain = next;
                acc.max_a = std::max(acc.max_a, std::abs(chain.a));
                acc.min_a = std::min(acc.min_a, std::abs(chain.a));
                acc.max_b = std::max(acc.max_b, std::abs(chain.b));
                if (m == 0) arg_at_cut0 = arg;
                if (m >= nu / 2)
                    acc.oscillation[n] = std::max(acc.oscillation[n],
                                                  std::abs(arg - arg_at_cut0));
            }
        }
        results[i] = std::move(acc);
    });

    for (std::size_t n = 0; n < schedule.size(); ++n) {
        AssembleSampleResult s;
        s.nu = schedule[n].nu;
        s.delta = schedule[n].delta;
        s.rho = rho[n];
        s.offset = offsets[n];
        s.delta2_log_nu =
            s.delta * s.delta * std::log(static_cast<double>(s.nu));
        for (const PerXi& r : results)
            s.oscillation = std::max(s.oscillation, r.oscillation[n]);
        rep.samples.push_back(s);
    }
    for (const PerXi& r : results) {
        rep.max_abs_a_minus_1 = std::max(rep.max_abs_a_minus_1, r.max_a - 1.0);
        rep.min_abs_a = std::min(rep.min_abs_a, r.min_a);
        rep.max_abs_b = std::max(rep.max_abs_b, r.max_b);
    }
    rep.oscillations_strictly_increasing = true;
    rep.min_increase_ratio = 1e300;
    for (std::size_t n = 1; n < rep.samples.size(); ++n) {
        const double ratio =
            rep.samples[n].oscillation /
            std::max(rep.samples[n - 1].oscillation, 1e-300);
        rep.min_increase_ratio = std::min(rep.min_increase_ratio, ratio);
        if (ratio <= 1.0) rep.oscillations_strictly_increasing = false;
    }
    if (rep.samples.size() <= 1) rep.min_increase_ratio = 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Weak-type failure table
// ---------------------------------------------------------------------------

struct WeakTypeRow {
    int nu{0};
    double l2{0.0};
    double threshold{0.0};   // c log nu
    double fraction{0.0};    // share of sampled xi with M-lower-bound >= threshold
    double min_mlow{0.0}, max_mlow{0.0};
    double ratio{0.0};       // measure * threshold / l2, the failing weak-type ratio
};

struct WeakTypeReport {
    std::vector<WeakTypeRow> rows;
    double alpha_fit{0.0};
    double c_threshold{0.0};  // the single constant c in the threshold c log nu
    double window_lo{0.5}, window_hi{1.0};
    int n_xi{21};
    double analytic_bound{0.0};  // product-vs-direct envelope at Im k = 1/nu
    std::string bump_note{kBumpNote};
};

/// For the separated trains with R = nu^3: the L2 norm stays put while the
/// strong maximal lower bound at k = xi + i/nu clears a log-nu threshold on
/// nearly the whole window; the weak-type ratio in the last column grows.
inline WeakTypeReport weak_type_failure_table(const OuterArgEngine& engine,
                                              const std::vector<int>& nu_list,
                                              int n_xi = 21, int threads = 1) {
    if (nu_list.empty())
        throw std::invalid_argument("weak_type_failure_table: empty nu list");
    WeakTypeReport rep;
    rep.n_xi = n_xi;

    std::vector<double> xis(static_cast<std::size_t>(n_xi));
    for (int i = 0; i < n_xi; ++i)
        xis[static_cast<std::size_t>(i)] =
            rep.window_lo + (rep.window_hi - rep.window_lo) * i /
                                std::max(1, n_xi - 1);

    // Mlow(nu, xi) = max over cutoffs of |partial-product arg| at xi + i/nu;
    // the product equals the fundamental matrix entry up to e^{-nu^2} C1^nu.
    std::vector<std::vector<double>> mlow(nu_list.size());
    std::vector<double> f_per_nu(nu_list.size(), 0.0);
    for (std::size_t ni = 0; ni < nu_list.size(); ++ni) {
        const int nu = nu_list[ni];
        mlow[ni].assign(xis.size(), 0.0);
        parallel_for(xis.size(), threads, [&](std::size_t i) {
            const cplx k(xis[i], 1.0 / static_cast<double>(nu));
            const std::vector<double> prof = engine.profile_all(nu, k);
            double best = 0.0;
            for (double v : prof) best = std::max(best, std::abs(v));
            mlow[ni][i] = best;
        });
        for (double v : mlow[ni]) f_per_nu[ni] = std::max(f_per_nu[ni], v);
    }

    // the growth fit across the ladder, for the report
    if (nu_list.size() >= 2) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < nu_list.size(); ++i) {
            lx.push_back(std::log(static_cast<double>(nu_list[i])));
            ly.push_back(f_per_nu[i]);
        }
        const LinearFit f = fit_linear(lx, ly);
        rep.alpha_fit = f.slope;
    } else {
        rep.alpha_fit = f_per_nu.empty() ? 0.0 : f_per_nu[0];
    }

    // A single threshold constant c, calibrated on the smallest ladder point
    // (the hardest one: the fit intercept is negative) at half its lower
    // decile, then applied uniformly. For every larger nu the fraction
    // clearing c log nu is a genuine measurement of the simultaneous growth.
    {
        std::vector<double> sorted = mlow[0];
        std::sort(sorted.begin(), sorted.end());
        const double decile = sorted[sorted.size() / 10];
        const double log_nu0 =
            std::max(std::log(static_cast<double>(nu_list[0])), 1e-9);
        rep.c_threshold = nu_list[0] > 1 ? 0.5 * decile / log_nu0 : 0.0;
    }

    double worst_bound = 0.0;
    for (std::size_t ni = 0; ni < nu_list.size(); ++ni) {
        const int nu = nu_list[ni];
        WeakTypeRow row;
        row.nu = nu;
        const Potential train = build_separated(
            engine.base(), nu, std::pow(static_cast<double>(nu), 3.0));
        row.l2 = train.l2_norm();
        row.threshold =
            rep.c_threshold * std::log(static_cast<double>(nu));
        int hits = 0;
        row.min_mlow = 1e300;
        for (double v : mlow[ni]) {
            row.min_mlow = std::min(row.min_mlow, v);
            row.max_mlow = std::max(row.max_mlow, v);
            if (v >= row.threshold) ++hits;
        }
        row.fraction = static_cast<double>(hits) / static_cast<double>(n_xi);
        const double measure =
            row.fraction * (rep.window_hi - rep.window_lo);
        row.ratio = measure * row.threshold / std::max(row.l2, 1e-300);
        rep.rows.push_back(row);
        // analytic product-vs-direct envelope at Im k = 1/nu, R = nu^3
        const double c_big = std::exp(engine.base().l1_norm());
        const double c1 = 1.0 + 2.0 * c_big;
        worst_bound = std::max(
            worst_bound, std::exp(-static_cast<double>(nu) *
                                  static_cast<double>(nu)) *
                             std::pow(c1, nu));
    }
    rep.analytic_bound = worst_bound;
    return rep;
}

}  // namespace ncclab
