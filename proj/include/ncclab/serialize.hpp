#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncclab/dirac.hpp"
#include "ncclab/experiments.hpp"
#include "ncclab/outer.hpp"
#include "ncclab/potential.hpp"

namespace ncclab {

using json = nlohmann::ordered_json;

/// 17 significant digits: doubles round-trip bit-exactly through the text.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex: expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

// ---------------------------------------------------------------------------
// Potential <-> JSON (tagged union mirroring the representation)
// ---------------------------------------------------------------------------

inline json potential_to_json(const Potential& p) {
    using K = Potential::Kind;
    const Potential::Node& n = p.root();
    json j;
    switch (n.kind) {
        case K::Zero:
            j["type"] = "zero";
            break;
        case K::Grid: {
            j["type"] = "grid";
            j["x0"] = n.x0;
            j["h"] = n.h;
            json samples = json::array();
            for (cplx s : n.samples) samples.push_back(complex_to_json(s));
            j["samples"] = std::move(samples);
            break;
        }
        case K::Bump:
            j["type"] = "bump";
            j["template"] = (n.shape == BumpShape::SmoothCompact) ? "smooth_compact"
                            : (n.shape == BumpShape::Indicator)   ? "indicator"
                                                                  : "gaussian";
            j["center"] = n.center;
            j["width"] = n.width;
            j["amplitude"] = complex_to_json(n.amplitude);
            break;
        case K::Modulated:
            j["type"] = "modulated";
            j["ell"] = n.ell;
            j["inner"] = potential_to_json(Potential(n.inner));
            break;
        case K::Dilated:
            j["type"] = "dilated";
            j["mu"] = n.mu;
            j["inner"] = potential_to_json(Potential(n.inner));
            break;
        case K::Translated:
            j["type"] = "translated";
            j["shift"] = n.shift;
            j["inner"] = potential_to_json(Potential(n.inner));
            break;
        case K::Conjugated:
            j["type"] = "conjugated";
            j["inner"] = potential_to_json(Potential(n.inner));
            break;
        case K::Rotated:
            j["type"] = "rotated";
            j["zeta"] = complex_to_json(n.zeta);
            j["inner"] = potential_to_json(Potential(n.inner));
            break;
        case K::Composite: {
            j["type"] = "composite";
            json pieces = json::array();
            for (const auto& [piece, off] : p.pieces()) {
                json e;
                e["offset"] = off;
                e["spec"] = potential_to_json(piece);
                pieces.push_back(std::move(e));
            }
            j["pieces"] = std::move(pieces);
            break;
        }
    }
    return j;
}

inline Potential potential_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "zero") return Potential::zero();
    if (type == "grid") {
        std::vector<cplx> samples;
        for (const json& s : j.at("samples")) samples.push_back(complex_from_json(s));
        return Potential::grid_sampled(j.at("x0").get<double>(),
                                       j.at("h").get<double>(), std::move(samples));
    }
    if (type == "bump") {
        const std::string tpl = j.at("template").get<std::string>();
        BumpShape shape;
        if (tpl == "smooth_compact") shape = BumpShape::SmoothCompact;
        else if (tpl == "indicator") shape = BumpShape::Indicator;
        else if (tpl == "gaussian") shape = BumpShape::Gaussian;
        else throw std::invalid_argument("potential: unknown bump template " + tpl);
        return Potential::bump(shape, j.at("center").get<double>(),
                               j.at("width").get<double>(),
                               complex_from_json(j.at("amplitude")));
    }
    if (type == "modulated")
        return potential_from_json(j.at("inner")).modulated(j.at("ell").get<double>());
    if (type == "dilated")
        return potential_from_json(j.at("inner")).dilated(j.at("mu").get<double>());
    if (type == "translated")
        return potential_from_json(j.at("inner")).translated(j.at("shift").get<double>());
    if (type == "conjugated") return potential_from_json(j.at("inner")).conjugated();
    if (type == "rotated")
        return potential_from_json(j.at("inner")).rotated(complex_from_json(j.at("zeta")));
    if (type == "composite") {
        std::vector<std::pair<Potential, double>> pieces;
        for (const json& e : j.at("pieces"))
            pieces.emplace_back(potential_from_json(e.at("spec")),
                                e.at("offset").get<double>());
        return Potential::composite(std::move(pieces));
    }
    throw std::invalid_argument("potential: unknown type " + type);
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

inline std::string scattering_to_csv(const ScatteringCoeffs& sc) {
    std::ostringstream out;
    out << "xi,re_a,im_a,re_b,im_b,re_r,im_r\n";
    for (std::size_t i = 0; i < sc.xi.size(); ++i) {
        out << format_double(sc.xi[i]) << ',' << format_double(sc.a[i].real())
            << ',' << format_double(sc.a[i].imag()) << ','
            << format_double(sc.b[i].real()) << ',' << format_double(sc.b[i].imag())
            << ',' << format_double(sc.r[i].real()) << ','
            << format_double(sc.r[i].imag()) << '\n';
    }
    return out.str();
}

inline json scattering_to_json(const ScatteringCoeffs& sc) {
    json rows = json::array();
    for (std::size_t i = 0; i < sc.xi.size(); ++i) {
        json r;
        r["xi"] = sc.xi[i];
        r["a"] = complex_to_json(sc.a[i]);
        r["b"] = complex_to_json(sc.b[i]);
        r["r"] = complex_to_json(sc.r[i]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string arg_trace_to_csv(const ArgTrace& tr) {
    std::ostringstream out;
    out << "eta,re_value,im_value,unwrapped_arg\n";
    for (std::size_t i = 0; i < tr.path.size(); ++i) {
        out << format_double(tr.path[i].imag()) << ','
            << format_double(tr.values[i].real()) << ','
            << format_double(tr.values[i].imag()) << ','
            << format_double(tr.unwrapped_arg[i]) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Experiment reports -> JSON / CSV summaries
// ---------------------------------------------------------------------------

inline json fit_to_json(const LinearFit& f) {
    json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["correlation"] = f.correlation;
    j["residual_rms"] = f.residual_rms;
    return j;
}

inline json report_to_json(const DecoupledGrowthReport& r) {
    json j;
    j["construction"] = "decoupled_growth";
    j["params"] = {{"nu_list", r.nu_list},
                   {"xi_lo", r.xi_lo},
                   {"xi_hi", r.xi_hi},
                   {"n_xi", r.n_xi},
                   {"tol", r.tol}};
    json rows = json::array();
    for (const GrowthRow& row : r.rows)
        rows.push_back({{"nu", row.nu},
                        {"xi", row.xi},
                        {"max_abs_arg", row.max_abs_arg},
                        {"arg_max_j", row.arg_max_j}});
    j["rows"] = std::move(rows);
    j["f_per_nu"] = r.f_per_nu;
    j["fit"] = fit_to_json(r.fit);
    j["fit_model"] = "max|arg| ~ alpha*log(nu) + beta";
    j["budgets"] = {{"max_route_diff", r.max_route_diff}};
    j["notes"] = json::array({r.bump_note});
    return j;
}

inline std::string report_to_csv(const DecoupledGrowthReport& r) {
    std::ostringstream out;
    out << "nu,f_max_arg\n";
    for (std::size_t i = 0; i < r.nu_list.size(); ++i)
        out << r.nu_list[i] << ',' << format_double(r.f_per_nu[i]) << '\n';
    return out.str();
}

inline json report_to_json(const SeparatedGrowthReport& r) {
    json j;
    j["construction"] = "separated_growth";
    j["params"] = {{"nu", r.nu},
                   {"R", r.R},
                   {"k_check", complex_to_json(r.k_check)},
                   {"tol", r.tol}};
    json rows = json::array();
    for (const SeparatedRow& row : r.product_vs_direct)
        rows.push_back({{"ell", row.ell},
                        {"diff", row.diff},
                        {"envelope", row.envelope}});
    j["product_vs_direct"] = std::move(rows);
    j["c1"] = r.c1;
    j["envelope_holds"] = r.envelope_holds;
    j["xi_samples"] = r.xi_samples;
    j["m_lower_bounds"] = r.m_lower_bounds;
    j["notes"] = json::array({r.bump_note});
    return j;
}

inline json report_to_json(const DiracSampleReport& r) {
    json j;
    j["construction"] = "dirac_sample";
    j["params"] = {{"nu", r.nu}, {"delta", r.delta}, {"rho", r.rho}, {"tol", r.tol}};
    json rows = json::array();
    for (const SampleRow& row : r.rows)
        rows.push_back({{"m", row.m}, {"xi", row.xi}, {"arg", row.arg_value}});
    j["rows"] = std::move(rows);
    j["max_abs_arg"] = r.max_abs_arg;
    j["coeff_upper"] = r.coeff_upper;
    j["max_abs_b"] = r.max_abs_b;
    j["unimod_residual"] = r.unimod_residual;
    j["arg_vs_logm"] = fit_to_json(r.arg_vs_logm);
    j["budgets"] = {{"phase", r.phase_budget}};
    j["notes"] = json::array({r.bump_note});
    return j;
}

inline json report_to_json(const AssembleReport& r) {
    json j;
    j["construction"] = "assemble";
    json rows = json::array();
    for (const AssembleSampleResult& s : r.samples)
        rows.push_back({{"nu", s.nu},
                        {"delta", s.delta},
                        {"rho", s.rho},
                        {"offset", s.offset},
                        {"oscillation", s.oscillation},
                        {"delta2_log_nu", s.delta2_log_nu}});
    j["samples"] = std::move(rows);
    j["xi_samples"] = r.xi_samples;
    j["oscillations_strictly_increasing"] = r.oscillations_strictly_increasing;
    j["min_increase_ratio"] = r.min_increase_ratio;
    j["max_abs_a_minus_1"] = r.max_abs_a_minus_1;
    j["min_abs_a"] = r.min_abs_a;
    j["max_abs_b"] = r.max_abs_b;
    j["budgets"] = {{"phase", r.phase_budget}};
    j["notes"] = json::array({r.bump_note});
    return j;
}

inline std::string report_to_csv(const AssembleReport& r) {
    std::ostringstream out;
    out << "n,nu,delta,oscillation,delta2_log_nu\n";
    for (std::size_t n = 0; n < r.samples.size(); ++n)
        out << n + 1 << ',' << r.samples[n].nu << ','
            << format_double(r.samples[n].delta) << ','
            << format_double(r.samples[n].oscillation) << ','
            << format_double(r.samples[n].delta2_log_nu) << '\n';
    return out.str();
}

inline json report_to_json(const WeakTypeReport& r) {
    json j;
    j["construction"] = "weak_type_table";
    j["params"] = {{"window_lo", r.window_lo},
                   {"window_hi", r.window_hi},
                   {"n_xi", r.n_xi},
                   {"c_threshold", r.c_threshold}};
    json rows = json::array();
    for (const WeakTypeRow& row : r.rows)
        rows.push_back({{"nu", row.nu},
                        {"l2", row.l2},
                        {"threshold", row.threshold},
                        {"fraction", row.fraction},
                        {"min_mlow", row.min_mlow},
                        {"max_mlow", row.max_mlow},
                        {"ratio", row.ratio}});
    j["rows"] = std::move(rows);
    j["alpha_fit"] = r.alpha_fit;
    j["budgets"] = {{"analytic_bound", r.analytic_bound}};
    j["notes"] = json::array({r.bump_note});
    return j;
}

inline std::string report_to_csv(const WeakTypeReport& r) {
    std::ostringstream out;
    out << "nu,l2,threshold,fraction,ratio\n";
    for (const WeakTypeRow& row : r.rows)
        out << row.nu << ',' << format_double(row.l2) << ','
            << format_double(row.threshold) << ',' << format_double(row.fraction)
            << ',' << format_double(row.ratio) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// JSON rendered with doubles at 17 significant digits (nlohmann's default
/// shortest-round-trip is already bit-faithful; we keep its output and only
/// pin the indentation so reruns are byte-identical).
inline std::string render_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ncclab
