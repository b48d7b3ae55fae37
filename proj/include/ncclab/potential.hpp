#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ncclab/phase.hpp"
#include "ncclab/quadrature.hpp"

namespace ncclab {

using cplx = std::complex<double>;

/// Closed interval [lo, hi]; the effective support of a coefficient.
struct Interval {
    double lo{0.0};
    double hi{0.0};
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class BumpShape {
    SmoothCompact,  // c * exp(-1/(t(1-t))) on (0,1), L2-normalized
    Indicator,      // 1 on [0,1]
    Gaussian,       // exp(-(x-center)^2 / (2 width^2)); width is the sigma
};

/// Immutable description of a coefficient A on R+ (Krein side) or q on R
/// (Dirac side). Transformations build small trees; evaluation walks them.
/// Values are cheap to copy (shared immutable nodes).
class Potential {
public:
    enum class Kind {
        Zero,
        Grid,        // uniform grid, linear interpolation inside support
        Bump,        // analytic template: shape, center, width, amplitude
        Modulated,   // inner * e^{i ell x}
        Dilated,     // mu * inner(mu x)
        Translated,  // inner(x - shift)
        Conjugated,  // conj(inner(x))
        Rotated,     // zeta * inner(x), |zeta| = 1
        Composite,   // ordered disjoint pieces at strictly increasing offsets
    };

    Potential() : node_(zero_node()) {}

    // ---- factories -------------------------------------------------------

    static Potential zero() { return Potential(); }

    static Potential grid_sampled(double x0, double h, std::vector<cplx> samples) {
        if (!(h > 0.0)) throw std::invalid_argument("grid_sampled: step must be > 0");
        if (samples.empty()) return zero();
        auto n = std::make_shared<Node>();
        n->kind = Kind::Grid;
        n->x0 = x0;
        n->h = h;
        n->samples = std::move(samples);
        n->support = {x0, x0 + h * static_cast<double>(n->samples.size() - 1)};
        n->freq_hint = kPiLocal / h;
        return Potential(std::move(n));
    }

    static Potential bump(BumpShape shape, double center, double width,
                          cplx amplitude) {
        if (!(width > 0.0)) throw std::invalid_argument("bump: width must be > 0");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Bump;
        n->shape = shape;
        n->center = center;
        n->width = width;
        n->amplitude = amplitude;
        if (shape == BumpShape::Gaussian) {
            // declared support where the tail is far below double roundoff
            n->support = {center - 40.0 * width, center + 40.0 * width};
            n->freq_hint = 4.0 / width;
        } else {
            n->support = {center - 0.5 * width, center + 0.5 * width};
            n->freq_hint = 16.0 / width;
        }
        return Potential(std::move(n));
    }

    /// The standard smooth bump on (0,1) with unit L2 norm.
    static Potential standard_bump() {
        return bump(BumpShape::SmoothCompact, 0.5, 1.0, 1.0);
    }

    static Potential indicator(double lo, double hi) {
        if (!(hi > lo)) throw std::invalid_argument("indicator: empty interval");
        return bump(BumpShape::Indicator, 0.5 * (lo + hi), hi - lo, 1.0);
    }

    static Potential composite(std::vector<std::pair<Potential, double>> pieces) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Composite;
        std::vector<std::pair<Potential, double>> kept;
        for (auto& [p, off] : pieces) {
            if (p.kind() == Kind::Zero) continue;
            kept.emplace_back(std::move(p), off);
        }
        if (kept.empty()) return zero();
        double prev_off = -std::numeric_limits<double>::infinity();
        double prev_hi = -std::numeric_limits<double>::infinity();
        for (auto& [p, off] : kept) {
            if (!(off > prev_off))
                throw std::invalid_argument(
                    "composite: offsets must be strictly increasing");
            const Interval s = p.support();
            if (off + s.lo < prev_hi)
                throw std::invalid_argument("composite: piece supports overlap");
            prev_off = off;
            prev_hi = off + s.hi;
            n->freq_hint = std::max(n->freq_hint, p.node_->freq_hint);
            n->pieces.push_back(p.node_);
            n->offsets.push_back(off);
        }
        n->support = {n->offsets.front() + n->pieces.front()->support.lo, prev_hi};
        return Potential(std::move(n));
    }

    // ---- the five symmetries ---------------------------------------------

    // Each transform distributes over Composite so that declared gaps stay
    // declared (downstream integration crosses gaps by exact phase factors,
    // never by quadrature).

    /// p(x) * e^{i ell x}
    Potential modulated(double ell) const;

    /// mu * p(mu x), mu > 0
    Potential dilated(double mu) const;

    /// p(x - shift)
    Potential translated(double shift) const;

    /// conj(p(x))
    Potential conjugated() const;

    /// zeta * p(x) with |zeta| = 1
    Potential rotated(cplx zeta) const;

    /// amplitude scaling (not one of the five laws; used for damped bumps)
    Potential scaled(cplx factor) const {
        if (factor == cplx(0.0) || is_zero()) return zero();
        const double m = std::abs(factor);
        Potential r = (m == 1.0) ? *this : scale_tree(*node_, m);
        const cplx phase = factor / m;
        return (phase == cplx(1.0)) ? r : r.rotated(phase);
    }

    // ---- evaluation --------------------------------------------------------

    cplx operator()(double x) const {
        if (!std::isfinite(x))
            throw std::invalid_argument("potential evaluation at non-finite x");
        return eval(*node_, x);
    }

    Kind kind() const { return node_->kind; }
    Interval support() const { return node_->support; }
    bool is_zero() const { return node_->kind == Kind::Zero; }

    /// Crude bound on the local oscillation frequency (rad per unit length);
    /// integrators use it to choose initial cell counts.
    double frequency_hint() const { return node_->freq_hint; }

    /// Positions where the coefficient is not smooth: support edges, grid
    /// nodes, composite piece boundaries.
    std::vector<double> breakpoints() const {
        std::vector<double> out;
        collect_breaks(*node_, 0.0, out);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Maximal intervals actually carrying the coefficient, in order; the
    /// complement consists of declared gaps (integrators cross those exactly).
    std::vector<Interval> support_regions() const {
        std::vector<Interval> out;
        collect_regions(*node_, 0.0, out);
        return merge_intervals(std::move(out));
    }

    static std::vector<Interval> merge_intervals(std::vector<Interval> v) {
        std::sort(v.begin(), v.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> out;
        for (const Interval& r : v) {
            if (!out.empty() && r.lo <= out.back().hi) {
                out.back().hi = std::max(out.back().hi, r.hi);
            } else {
                out.push_back(r);
            }
        }
        return out;
    }

    /// Composite pieces as (piece, offset); a non-composite is one piece at 0.
    std::vector<std::pair<Potential, double>> pieces() const {
        std::vector<std::pair<Potential, double>> out;
        if (kind() == Kind::Composite) {
            for (std::size_t i = 0; i < node_->pieces.size(); ++i)
                out.emplace_back(Potential(node_->pieces[i]), node_->offsets[i]);
        } else if (!is_zero()) {
            out.emplace_back(*this, 0.0);
        }
        return out;
    }

    // ---- norms -------------------------------------------------------------

    /// integral of |p|^alpha over the support, adaptive to rel tol 1e-8;
    /// composites integrate piece by piece (gaps contribute exactly nothing,
    /// and a global coarse scale would miss thin pieces in a sparse train)
    double integral_abs_pow(double alpha, double rel_tol = 1e-8) const {
        if (is_zero()) return 0.0;
        if (kind() == Kind::Composite) {
            double total = 0.0;
            for (const auto& [piece, off] : pieces())
                total += piece.integral_abs_pow(alpha, rel_tol);
            return total;
        }
        const Interval s = support();
        auto f = [&](double x) { return std::pow(std::abs((*this)(x)), alpha); };
        const double scale =
            std::max(1e-300, coarse_scale(alpha));
        return integrate_piecewise(f, s.lo, s.hi, breakpoints(),
                                   rel_tol * scale);
    }

    double l1_norm(double rel_tol = 1e-8) const { return integral_abs_pow(1.0, rel_tol); }
    double l2_norm_sq(double rel_tol = 1e-8) const { return integral_abs_pow(2.0, rel_tol); }
    double l2_norm(double rel_tol = 1e-8) const { return std::sqrt(l2_norm_sq(rel_tol)); }

    /// mass of |p| outside [-h, h]
    double tail_mass(double h, double rel_tol = 1e-8) const {
        if (is_zero()) return 0.0;
        if (kind() == Kind::Composite) {
            double total = 0.0;
            for (const auto& [piece, off] : pieces())
                total += piece.translated(off).tail_mass(h, rel_tol);
            return total;
        }
        const Interval s = support();
        double total = 0.0;
        auto f = [&](double x) { return std::abs((*this)(x)); };
        const double scale = std::max(1e-300, coarse_scale(1.0));
        if (s.lo < -h)
            total += integrate_piecewise(f, s.lo, std::min(-h, s.hi),
                                         breakpoints(), rel_tol * scale);
        if (s.hi > h)
            total += integrate_piecewise(f, std::max(h, s.lo), s.hi,
                                         breakpoints(), rel_tol * scale);
        return total;
    }

    bool operator==(const Potential& o) const { return node_ == o.node_; }

    // serialize.hpp walks the tree directly
    struct Node;
    const Node& root() const { return *node_; }

    struct Node {
        Kind kind{Kind::Zero};
        Interval support{0.0, 0.0};
        double freq_hint{0.0};
        // Grid
        double x0{0.0}, h{0.0};
        std::vector<cplx> samples;
        // Bump
        BumpShape shape{BumpShape::SmoothCompact};
        double center{0.0}, width{1.0};
        cplx amplitude{1.0};
        // wrappers
        std::shared_ptr<const Node> inner;
        double ell{0.0}, mu{1.0}, shift{0.0};
        cplx zeta{1.0};
        // Composite
        std::vector<std::shared_ptr<const Node>> pieces;
        std::vector<double> offsets;
    };

    explicit Potential(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

private:
    static constexpr double kPiLocal = 3.141592653589793238462643383279502884;

    std::shared_ptr<const Node> node_;

    static const std::shared_ptr<const Node>& zero_node() {
        static const std::shared_ptr<const Node> z = std::make_shared<Node>();
        return z;
    }

    std::shared_ptr<Node> wrap(Kind k) const {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->inner = node_;
        return n;
    }

    static Potential scale_tree(const Node& n, double m);

    static cplx eval(const Node& n, double x) {
        switch (n.kind) {
            case Kind::Zero:
                return 0.0;
            case Kind::Grid: {
                if (x < n.support.lo || x > n.support.hi) return 0.0;
                if (n.samples.size() == 1) return n.samples[0];
                const double t = (x - n.x0) / n.h;
                const auto i = static_cast<std::size_t>(
                    std::clamp<double>(std::floor(t), 0.0,
                                       static_cast<double>(n.samples.size() - 2)));
                const double w = t - static_cast<double>(i);
                return n.samples[i] * (1.0 - w) + n.samples[i + 1] * w;
            }
            case Kind::Bump: {
                if (!n.support.contains(x)) return 0.0;
                switch (n.shape) {
                    case BumpShape::SmoothCompact: {
                        const double u =
                            (x - n.center) / n.width + 0.5;  // unit coords
                        if (u <= 0.0 || u >= 1.0) return 0.0;
                        return n.amplitude * smooth_norm_const() *
                               std::exp(-1.0 / (u * (1.0 - u)));
                    }
                    case BumpShape::Indicator:
                        return n.amplitude;
                    case BumpShape::Gaussian: {
                        const double d = (x - n.center) / n.width;
                        return n.amplitude * std::exp(-0.5 * d * d);
                    }
                }
                return 0.0;
            }
            case Kind::Modulated: {
                const cplx v = eval(*n.inner, x);
                if (v == cplx(0.0)) return v;
                return v * std::polar(1.0, n.ell * x);
            }
            case Kind::Dilated:
                return n.mu * eval(*n.inner, n.mu * x);
            case Kind::Translated:
                return eval(*n.inner, x - n.shift);
            case Kind::Conjugated:
                return std::conj(eval(*n.inner, x));
            case Kind::Rotated:
                return n.zeta * eval(*n.inner, x);
            case Kind::Composite: {
                // pieces are ordered by offset; binary search the candidate
                const auto& offs = n.offsets;
                auto it = std::upper_bound(offs.begin(), offs.end(), x);
                // candidate pieces: the one before it (support may extend right)
                for (std::size_t trial = 0; trial < 2; ++trial) {
                    std::size_t idx;
                    if (it == offs.begin() && trial == 0) break;
                    if (trial == 0)
                        idx = static_cast<std::size_t>(it - offs.begin()) - 1;
                    else {
                        if (it == offs.end()) break;
                        idx = static_cast<std::size_t>(it - offs.begin());
                    }
                    const Node& piece = *n.pieces[idx];
                    const double local = x - offs[idx];
                    if (piece.support.contains(local)) return eval(piece, local);
                }
                return 0.0;  // inside a declared gap: exactly zero
            }
        }
        return 0.0;
    }

    /// L2 normalization constant for the smooth template on (0,1).
    static double smooth_norm_const() {
        static const double c = [] {
            const double ii = integrate_adaptive(
                [](double u) {
                    if (u <= 0.0 || u >= 1.0) return 0.0;
                    return std::exp(-2.0 / (u * (1.0 - u)));
                },
                0.0, 1.0, 1e-16);
            return 1.0 / std::sqrt(ii);
        }();
        return c;
    }

    double coarse_scale(double alpha) const {
        // rough magnitude of the integral, for converting rel tol to abs tol
        const Interval s = support();
        const int n = 64;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = s.lo + (i + 0.5) * s.length() / n;
            acc += std::pow(std::abs((*this)(x)), alpha);
        }
        return acc * s.length() / n;
    }

    static void collect_regions(const Node& n, double offset,
                                std::vector<Interval>& out) {
        if (n.kind == Kind::Zero) return;
        if (n.kind == Kind::Composite) {
            for (std::size_t i = 0; i < n.pieces.size(); ++i)
                collect_regions(*n.pieces[i], offset + n.offsets[i], out);
            return;
        }
        if (n.kind == Kind::Translated) {
            collect_regions(*n.inner, offset + n.shift, out);
            return;
        }
        if (n.kind == Kind::Modulated || n.kind == Kind::Conjugated ||
            n.kind == Kind::Rotated) {
            collect_regions(*n.inner, offset, out);
            return;
        }
        out.push_back({offset + n.support.lo, offset + n.support.hi});
    }

    static void collect_breaks(const Node& n, double offset,
                               std::vector<double>& out) {
        switch (n.kind) {
            case Kind::Zero:
                return;
            case Kind::Grid: {
                // grid nodes are kinks of the linear interpolant
                const std::size_t count = n.samples.size();
                if (count <= 4097) {
                    for (std::size_t i = 0; i < count; ++i)
                        out.push_back(offset + n.x0 + n.h * static_cast<double>(i));
                } else {
                    out.push_back(offset + n.support.lo);
                    out.push_back(offset + n.support.hi);
                }
                return;
            }
            case Kind::Bump:
                out.push_back(offset + n.support.lo);
                out.push_back(offset + n.support.hi);
                return;
            case Kind::Modulated:
            case Kind::Conjugated:
            case Kind::Rotated:
                collect_breaks(*n.inner, offset, out);
                return;
            case Kind::Dilated: {
                std::vector<double> inner_breaks;
                collect_breaks(*n.inner, 0.0, inner_breaks);
                for (double b : inner_breaks) out.push_back(offset + b / n.mu);
                return;
            }
            case Kind::Translated:
                collect_breaks(*n.inner, offset + n.shift, out);
                return;
            case Kind::Composite:
                for (std::size_t i = 0; i < n.pieces.size(); ++i)
                    collect_breaks(*n.pieces[i], offset + n.offsets[i], out);
                return;
        }
    }
};

inline Potential Potential::modulated(double ell) const {
    if (kind() == Kind::Zero || ell == 0.0) return *this;
    if (kind() == Kind::Composite) {
        std::vector<std::pair<Potential, double>> ps;
        for (const auto& [piece, off] : pieces()) {
            // e^{i ell x} = e^{i ell off} * e^{i ell u} in piece coordinates
            Potential q = piece.modulated(ell).rotated(expi_prod(ell, off));
            ps.emplace_back(std::move(q), off);
        }
        return composite(std::move(ps));
    }
    auto n = wrap(Kind::Modulated);
    n->ell = ell;
    n->support = support();
    n->freq_hint = node_->freq_hint + std::abs(ell);
    return Potential(std::move(n));
}

inline Potential Potential::dilated(double mu) const {
    if (!(mu > 0.0)) throw std::invalid_argument("dilated: mu must be > 0");
    if (kind() == Kind::Zero || mu == 1.0) return *this;
    if (kind() == Kind::Composite) {
        std::vector<std::pair<Potential, double>> ps;
        for (const auto& [piece, off] : pieces())
            ps.emplace_back(piece.dilated(mu), off / mu);
        return composite(std::move(ps));
    }
    auto n = wrap(Kind::Dilated);
    n->mu = mu;
    n->support = {support().lo / mu, support().hi / mu};
    n->freq_hint = node_->freq_hint * mu;
    return Potential(std::move(n));
}

inline Potential Potential::translated(double shift) const {
    if (kind() == Kind::Zero || shift == 0.0) return *this;
    if (kind() == Kind::Composite) {
        std::vector<std::pair<Potential, double>> ps;
        for (const auto& [piece, off] : pieces())
            ps.emplace_back(piece, off + shift);
        return composite(std::move(ps));
    }
    auto n = wrap(Kind::Translated);
    n->shift = shift;
    n->support = {support().lo + shift, support().hi + shift};
    n->freq_hint = node_->freq_hint;
    return Potential(std::move(n));
}

inline Potential Potential::conjugated() const {
    if (kind() == Kind::Zero) return *this;
    if (kind() == Kind::Composite) {
        std::vector<std::pair<Potential, double>> ps;
        for (const auto& [piece, off] : pieces())
            ps.emplace_back(piece.conjugated(), off);
        return composite(std::move(ps));
    }
    auto n = wrap(Kind::Conjugated);
    n->support = support();
    n->freq_hint = node_->freq_hint;
    return Potential(std::move(n));
}

inline Potential Potential::rotated(cplx zeta) const {
    if (std::abs(std::abs(zeta) - 1.0) > 1e-12)
        throw std::invalid_argument("rotated: |zeta| must be 1");
    if (kind() == Kind::Zero || zeta == cplx(1.0)) return *this;
    if (kind() == Kind::Composite) {
        std::vector<std::pair<Potential, double>> ps;
        for (const auto& [piece, off] : pieces())
            ps.emplace_back(piece.rotated(zeta), off);
        return composite(std::move(ps));
    }
    auto n = wrap(Kind::Rotated);
    n->zeta = zeta;
    n->support = support();
    n->freq_hint = node_->freq_hint;
    return Potential(std::move(n));
}

inline Potential Potential::scale_tree(const Node& n, double m) {
    switch (n.kind) {
        case Kind::Zero:
            return Potential::zero();
        case Kind::Grid: {
            std::vector<cplx> s = n.samples;
            for (auto& v : s) v *= m;
            return Potential::grid_sampled(n.x0, n.h, std::move(s));
        }
        case Kind::Bump:
            return Potential::bump(n.shape, n.center, n.width, n.amplitude * m);
        case Kind::Modulated:
            return scale_tree(*n.inner, m).modulated(n.ell);
        case Kind::Dilated:
            return scale_tree(*n.inner, m).dilated(n.mu);
        case Kind::Translated:
            return scale_tree(*n.inner, m).translated(n.shift);
        case Kind::Conjugated:
            return scale_tree(*n.inner, m).conjugated();
        case Kind::Rotated:
            return scale_tree(*n.inner, m).rotated(n.zeta);
        case Kind::Composite: {
            std::vector<std::pair<Potential, double>> ps;
            for (std::size_t i = 0; i < n.pieces.size(); ++i)
                ps.emplace_back(scale_tree(*n.pieces[i], m), n.offsets[i]);
            return Potential::composite(std::move(ps));
        }
    }
    return Potential::zero();
}

// ---- norm reporting ---------------------------------------------------------

/// L1/L2 bookkeeping with tail masses; produced by norms().
class NormReport {
public:
    NormReport(Potential p, double l1, double l2, bool truncated)
        : pot_(std::move(p)), l1_(l1), l2_(l2), truncated_(truncated) {}

    double l1() const { return l1_; }
    double l2() const { return l2_; }
    /// mass of |p| outside [-h, h]; nonincreasing in h, tail_mass(0) <= l1
    double tail_mass(double h) const { return pot_.tail_mass(h); }
    /// true when the representation has an analytically unbounded tail that
    /// the declared support truncates (flagged, never silent)
    bool tail_truncated() const { return truncated_; }

private:
    Potential pot_;
    double l1_;
    double l2_;
    bool truncated_;
};

namespace detail {
inline bool has_unbounded_template(const Potential::Node& n) {
    switch (n.kind) {
        case Potential::Kind::Bump:
            return n.shape == BumpShape::Gaussian;
        case Potential::Kind::Modulated:
        case Potential::Kind::Dilated:
        case Potential::Kind::Translated:
        case Potential::Kind::Conjugated:
        case Potential::Kind::Rotated:
            return has_unbounded_template(*n.inner);
        case Potential::Kind::Composite: {
            for (const auto& p : n.pieces)
                if (has_unbounded_template(*p)) return true;
            return false;
        }
        default:
            return false;
    }
}
}  // namespace detail

inline NormReport norms(const Potential& p, double rel_tol = 1e-8) {
    return NormReport(p, p.l1_norm(rel_tol), p.l2_norm(rel_tol),
                      detail::has_unbounded_template(p.root()));
}

// ---- constructed families ----------------------------------------------------

/// The nu dilated, downward-modulated copies A_j = dilate(base, 1/nu) * e^{-i (j/nu) x}.
/// base must be supported in (0,1) and not identically zero.
inline std::vector<Potential> build_decoupled_family(const Potential& base,
                                                     int nu) {
    if (nu < 1) throw std::invalid_argument("build_decoupled_family: nu >= 1");
    if (base.is_zero())
        throw std::invalid_argument("build_decoupled_family: base is zero");
    const Interval s = base.support();
    if (s.lo < -1e-12 || s.hi > 1.0 + 1e-12)
        throw std::invalid_argument(
            "build_decoupled_family: base must be supported in (0,1)");
    std::vector<Potential> out;
    out.reserve(static_cast<std::size_t>(nu));
    const Potential dil = base.dilated(1.0 / static_cast<double>(nu));
    for (int j = 0; j < nu; ++j) {
        const double xi_j = static_cast<double>(j) / static_cast<double>(nu);
        out.push_back(j == 0 ? dil : dil.modulated(-xi_j));
    }
    return out;
}

/// Q_{nu,R}: the decoupled bumps placed at offsets j*(nu+R), leaving exact
/// gaps of length R between consecutive supports.
inline Potential build_separated(const Potential& base, int nu, double R) {
    if (R < 0.0) throw std::invalid_argument("build_separated: R >= 0");
    auto family = build_decoupled_family(base, nu);
    std::vector<std::pair<Potential, double>> pieces;
    pieces.reserve(family.size());
    const double stride = static_cast<double>(nu) + R;
    for (int j = 0; j < nu; ++j)
        pieces.emplace_back(std::move(family[static_cast<std::size_t>(j)]),
                            stride * static_cast<double>(j));
    return Potential::composite(std::move(pieces));
}

/// Dirac-side sample: sum_{j=0}^{m} q_j(x - rho j) with
/// q_j = modulate(dilate(delta*base, 1/nu), +j/nu).
inline Potential build_sample(const Potential& base, int nu, int m, double rho,
                              double delta) {
    if (!(delta >= 0.0) || delta >= 1.0)
        throw std::invalid_argument("build_sample: need 0 <= delta < 1");
    if (m < 0 || m > nu - 1)
        throw std::invalid_argument("build_sample: need 0 <= m <= nu-1");
    if (delta == 0.0) return Potential::zero();
    const Potential damped = Potential(base).scaled(delta);
    const Interval s = damped.dilated(1.0 / static_cast<double>(nu)).support();
    if (!(rho > s.length()))
        throw std::invalid_argument(
            "build_sample: rho must exceed the bump support diameter");
    const Potential dil = damped.dilated(1.0 / static_cast<double>(nu));
    std::vector<std::pair<Potential, double>> pieces;
    for (int j = 0; j <= m; ++j) {
        const double xi_j = static_cast<double>(j) / static_cast<double>(nu);
        Potential q_j = (j == 0) ? dil : dil.modulated(+xi_j);
        pieces.emplace_back(std::move(q_j), rho * static_cast<double>(j));
    }
    return Potential::composite(std::move(pieces));
}

/// Places whole samples at strictly increasing offsets with exact gap
/// bookkeeping; gaps must exceed every sample's support diameter.
inline Potential assemble_sparse(const std::vector<Potential>& samples,
                                 const std::vector<double>& offsets) {
    if (samples.size() != offsets.size())
        throw std::invalid_argument("assemble_sparse: size mismatch");
    std::vector<std::pair<Potential, double>> pieces;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].is_zero()) continue;
        pieces.emplace_back(samples[i], offsets[i]);
    }
    return Potential::composite(std::move(pieces));  // overlap check inside
}

/// Pointwise sum of placed, scaled coefficients whose supports may overlap.
/// Not a PotentialSpec representation (those keep gaps declared and pieces
/// disjoint); this is the evaluation-side object direct integrations need
/// when studying q + v perturbations and overlapping compositions.
class SumPotential {
public:
    struct Term {
        Potential p;
        double offset{0.0};
        cplx scale{1.0};
    };

    SumPotential() = default;
    explicit SumPotential(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static SumPotential of(const Potential& a, const Potential& b,
                           double b_offset = 0.0, cplx b_scale = 1.0) {
        return SumPotential({Term{a, 0.0, 1.0}, Term{b, b_offset, b_scale}});
    }

    cplx operator()(double x) const {
        cplx acc = 0.0;
        for (const Term& t : terms_) acc += t.scale * t.p(x - t.offset);
        return acc;
    }

    bool is_zero() const { return terms_.empty(); }

    Interval support() const {
        double lo = 1e300, hi = -1e300;
        for (const Term& t : terms_) {
            if (t.p.is_zero()) continue;
            lo = std::min(lo, t.p.support().lo + t.offset);
            hi = std::max(hi, t.p.support().hi + t.offset);
        }
        if (hi < lo) return {0.0, 0.0};
        return {lo, hi};
    }

    std::vector<Interval> support_regions() const {
        std::vector<Interval> all;
        for (const Term& t : terms_) {
            for (const Interval& r : t.p.support_regions())
                all.push_back({r.lo + t.offset, r.hi + t.offset});
        }
        return Potential::merge_intervals(std::move(all));
    }

    std::vector<double> breakpoints() const {
        std::vector<double> out;
        for (const Term& t : terms_)
            for (double b : t.p.breakpoints()) out.push_back(b + t.offset);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    double frequency_hint() const {
        double h = 0.0;
        for (const Term& t : terms_) h = std::max(h, t.p.frequency_hint());
        return h;
    }

    double l1_norm(double rel_tol = 1e-8) const {
        if (terms_.empty()) return 0.0;
        const Interval s = support();
        auto f = [this](double x) { return std::abs((*this)(x)); };
        double coarse = 0.0;
        for (int i = 0; i < 64; ++i)
            coarse += f(s.lo + (i + 0.5) * s.length() / 64) * s.length() / 64;
        return integrate_piecewise(f, s.lo, s.hi, breakpoints(),
                                   rel_tol * std::max(coarse, 1e-300));
    }

    const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
};

/// p(-x), exact on every representation (all bump templates are even about
/// their center). Used by the Krein <-> Dirac correspondence, which needs the
/// left half-line of q folded onto R+.
inline Potential reflect(const Potential& p) {
    using K = Potential::Kind;
    const Potential::Node& n = p.root();
    switch (n.kind) {
        case K::Zero:
            return Potential::zero();
        case K::Grid: {
            std::vector<cplx> s(n.samples.rbegin(), n.samples.rend());
            const double new_x0 = -(n.x0 + n.h * static_cast<double>(n.samples.size() - 1));
            return Potential::grid_sampled(new_x0, n.h, std::move(s));
        }
        case K::Bump:
            return Potential::bump(n.shape, -n.center, n.width, n.amplitude);
        case K::Modulated:
            return reflect(Potential(n.inner)).modulated(-n.ell);
        case K::Dilated:
            return reflect(Potential(n.inner)).dilated(n.mu);
        case K::Translated:
            return reflect(Potential(n.inner)).translated(-n.shift);
        case K::Conjugated:
            return reflect(Potential(n.inner)).conjugated();
        case K::Rotated:
            return reflect(Potential(n.inner)).rotated(n.zeta);
        case K::Composite: {
            std::vector<std::pair<Potential, double>> ps;
            const auto pieces = p.pieces();
            for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
                ps.emplace_back(reflect(it->first), -it->second);
            return Potential::composite(std::move(ps));
        }
    }
    return Potential::zero();
}

}  // namespace ncclab
