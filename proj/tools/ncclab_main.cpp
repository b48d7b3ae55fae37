// Command-line front end: runs named experiments and emits their data files.
//
//   ncclab figure2  --out out/
//   ncclab growth   --config cfg.json --threads 2
//   ncclab sample   --out out/ --format json
//   ncclab assemble --out out/
//   ncclab weaktype --out out/
//   ncclab sumrule  --out out/
//   ncclab verify   --seed 7
//
// Every run is deterministic for a fixed seed and independent of --threads.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncclab/cli_config.hpp"
#include "ncclab/experiments.hpp"
#include "ncclab/outer.hpp"
#include "ncclab/serialize.hpp"
#include "ncclab/verify.hpp"

namespace {

using ncclab::json;

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::string format;
    int threads = -1;
    long long seed = -1;
};

ncclab::ExperimentConfig load_config(const std::string& experiment,
                                     const CliOverrides& ov) {
    ncclab::ExperimentConfig cfg;
    if (!ov.config_path.empty()) {
        json j = json::parse(ncclab::read_text_file(ov.config_path));
        if (j.contains("experiment") &&
            j.at("experiment").get<std::string>() != experiment)
            throw ncclab::ConfigError(
                "config file is for experiment '" +
                j.at("experiment").get<std::string>() +
                "', but the subcommand is '" + experiment + "'");
        j["experiment"] = experiment;
        cfg = ncclab::parse_config(j);
    } else {
        cfg.experiment = experiment;
        // defaults pass validation for every experiment
        cfg = ncclab::parse_config(ncclab::config_to_json(cfg));
    }
    if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
    if (!ov.format.empty()) {
        if (ov.format != "csv" && ov.format != "json")
            throw ncclab::ConfigError("--format must be csv or json");
        cfg.format = ov.format;
    }
    if (ov.threads >= 0) cfg.threads = ov.threads;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const ncclab::ExperimentConfig& cfg,
                     const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

int cmd_figure2(const ncclab::ExperimentConfig& cfg) {
    using namespace ncclab;
    const Potential chi = Potential::indicator(0.0, 7.0);
    const ArgTrace tr = unwrapped_arg_along_ray(chi, 7.0, 2.0, 100.0,
                                                RayMode::Krein, cfg.tol);
    write_text_file(out_path(cfg, "figure2_trace.csv"), arg_trace_to_csv(tr));
    double min_mod = 1e300, total_var = 0.0;
    for (std::size_t i = 0; i < tr.values.size(); ++i) {
        min_mod = std::min(min_mod, std::abs(tr.values[i]));
        if (i > 0)
            total_var += std::abs(tr.unwrapped_arg[i] - tr.unwrapped_arg[i - 1]);
    }
    json summary;
    summary["endpoint_at_top"] = complex_to_json(tr.values.front());
    summary["endpoint_top_distance_to_one"] =
        std::abs(tr.values.front() - cplx(1.0));
    summary["value_at_axis"] = complex_to_json(tr.values.back());
    summary["arg_at_axis"] = tr.arg_at_end();
    summary["min_modulus"] = min_mod;
    summary["total_arg_variation"] = total_var;
    summary["points"] = tr.path.size();
    write_text_file(out_path(cfg, "figure2_summary.json"),
                    render_json(summary));
    std::printf("figure2: %zu points, arg(0) = %.6f, min|z| = %.9f\n",
                tr.path.size(), tr.arg_at_end(), min_mod);
    return 0;
}

int cmd_growth(const ncclab::ExperimentConfig& cfg) {
    using namespace ncclab;
    OuterArgEngine engine(Potential::standard_bump());
    const DecoupledGrowthReport rep =
        run_decoupled_growth(engine, cfg.nu_list, cfg.xi_lo, cfg.xi_hi,
                             cfg.n_xi, cfg.resolved_threads());
    write_text_file(out_path(cfg, "growth_report.json"),
                    render_json(report_to_json(rep)));
    if (cfg.format == "csv")
        write_text_file(out_path(cfg, "growth_summary.csv"), report_to_csv(rep));
    std::printf("growth: alpha = %.4f, corr = %.6f over %zu ladder points\n",
                rep.fit.slope, rep.fit.correlation, rep.nu_list.size());
    return 0;
}

int cmd_sample(const ncclab::ExperimentConfig& cfg) {
    using namespace ncclab;
    const Potential base = Potential::standard_bump();
    const double rho = cfg.rho > 0.0 ? cfg.rho : 8.0 * cfg.nu;
    json all = json::array();
    std::vector<double> deltas = cfg.delta_list, max_args;
    std::ostringstream csv;
    csv << "delta,max_abs_arg,coeff_upper,max_abs_b\n";
    for (double d : deltas) {
        const DiracSampleReport rep =
            run_dirac_sample(base, cfg.nu, d, rho, cfg.xi_lo, cfg.xi_hi,
                             cfg.n_xi, cfg.tol, cfg.resolved_threads());
        all.push_back(report_to_json(rep));
        max_args.push_back(rep.max_abs_arg);
        csv << format_double(d) << ',' << format_double(rep.max_abs_arg) << ','
            << format_double(rep.coeff_upper) << ','
            << format_double(rep.max_abs_b) << '\n';
    }
    json out;
    out["runs"] = std::move(all);
    if (deltas.size() >= 2) {
        const LinearFit f = fit_loglog(deltas, max_args);
        out["delta_scaling_slope"] = f.slope;
        out["delta_scaling_corr"] = f.correlation;
        std::printf("sample: delta-scaling slope = %.4f (quadratic mechanism)\n",
                    f.slope);
    }
    write_text_file(out_path(cfg, "sample_report.json"), render_json(out));
    if (cfg.format == "csv")
        write_text_file(out_path(cfg, "sample_summary.csv"), csv.str());
    return 0;
}

int cmd_assemble(const ncclab::ExperimentConfig& cfg) {
    using namespace ncclab;
    const AssembleReport rep =
        assemble_and_probe(Potential::standard_bump(), cfg.schedule, cfg.xi_lo,
                           cfg.xi_hi, cfg.n_xi, cfg.tol,
                           cfg.resolved_threads());
    write_text_file(out_path(cfg, "assemble_report.json"),
                    render_json(report_to_json(rep)));
    if (cfg.format == "csv")
        write_text_file(out_path(cfg, "assemble_summary.csv"),
                        report_to_csv(rep));
    std::printf("assemble: %zu samples, oscillations increasing = %s\n",
                rep.samples.size(),
                rep.oscillations_strictly_increasing ? "yes" : "no");
    return 0;
}

int cmd_weaktype(const ncclab::ExperimentConfig& cfg) {
    using namespace ncclab;
    OuterArgEngine engine(Potential::standard_bump());
    const WeakTypeReport rep = weak_type_failure_table(
        engine, cfg.nu_list, cfg.n_xi, cfg.resolved_threads());
    write_text_file(out_path(cfg, "weaktype_report.json"),
                    render_json(report_to_json(rep)));
    if (cfg.format == "csv")
        write_text_file(out_path(cfg, "weaktype_summary.csv"),
                        report_to_csv(rep));
    std::printf("weaktype: %zu rows, alpha = %.4f\n", rep.rows.size(),
                rep.alpha_fit);
    return 0;
}

int cmd_sumrule(const ncclab::ExperimentConfig& cfg) {
    using namespace ncclab;
    const Potential base = Potential::standard_bump();
    json out;
    std::ostringstream csv;
    csv << "mode,delta,lhs,rhs,residual\n";
    auto run_one = [&](const std::string& mode_name, SumRuleMode mode) {
        json rows = json::array();
        std::vector<double> deltas = cfg.delta_list, rhs_vals;
        for (double d : deltas) {
            const SumRule sr = sum_rule(base.scaled(d), mode, 0.0, cfg.tol);
            rows.push_back({{"delta", d},
                            {"lhs", sr.lhs},
                            {"rhs", sr.rhs},
                            {"residual", sr.residual}});
            rhs_vals.push_back(sr.rhs);
            csv << mode_name << ',' << format_double(d) << ','
                << format_double(sr.lhs) << ',' << format_double(sr.rhs) << ','
                << format_double(sr.residual) << '\n';
        }
        json section;
        section["rows"] = std::move(rows);
        if (deltas.size() >= 2)
            section["delta_scaling_slope"] = fit_loglog(deltas, rhs_vals).slope;
        out[mode_name] = std::move(section);
    };
    if (cfg.mode == "krein" || cfg.mode == "both")
        run_one("krein", SumRuleMode::Krein);
    if (cfg.mode == "dirac" || cfg.mode == "both")
        run_one("dirac", SumRuleMode::Dirac);
    write_text_file(out_path(cfg, "sumrule_report.json"), render_json(out));
    if (cfg.format == "csv")
        write_text_file(out_path(cfg, "sumrule_summary.csv"), csv.str());
    std::printf("sumrule: done\n");
    return 0;
}

int cmd_verify(const ncclab::ExperimentConfig& cfg) {
    using namespace ncclab;
    const std::vector<SuiteResult> results = run_all_suites(cfg.seed);
    json report = json::array();
    bool all_pass = true;
    std::string first_fail;
    for (const SuiteResult& s : results) {
        json entry;
        entry["suite"] = s.name;
        entry["seed"] = cfg.seed;
        entry["pass"] = s.pass;
        json details;
        for (const auto& [label, value] : s.details) details[label] = value;
        entry["details"] = std::move(details);
        report.push_back(std::move(entry));
        std::printf("%-24s %s\n", s.name.c_str(), s.pass ? "pass" : "FAIL");
        if (!s.pass && first_fail.empty()) first_fail = s.name;
        all_pass = all_pass && s.pass;
    }
    write_text_file(out_path(cfg, "verify_report.json"), render_json(report));
    if (!all_pass) {
        std::fprintf(stderr, "verify: first failing suite: %s\n",
                     first_fail.c_str());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for Krein systems and Dirac scattering"};
    app.require_subcommand(1);

    CliOverrides ov;
    app.add_option("--config", ov.config_path, "JSON config file")
        ->envname("NCCLAB_CONFIG");
    app.add_option("--out", ov.out_dir, "output directory");
    app.add_option("--format", ov.format, "summary format: csv|json");
    app.add_option("--threads", ov.threads,
                   "worker threads (env NCCLAB_THREADS as fallback)");
    app.add_option("--seed", ov.seed, "random seed for the randomized suites");

    const std::vector<std::string> names{"figure2", "growth",  "sample",
                                         "assemble", "weaktype", "sumrule",
                                         "verify"};
    for (const std::string& n : names) app.add_subcommand(n);

    CLI11_PARSE(app, argc, argv);

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        const ncclab::ExperimentConfig cfg = load_config(sub, ov);
        if (sub == "figure2") return cmd_figure2(cfg);
        if (sub == "growth") return cmd_growth(cfg);
        if (sub == "sample") return cmd_sample(cfg);
        if (sub == "assemble") return cmd_assemble(cfg);
        if (sub == "weaktype") return cmd_weaktype(cfg);
        if (sub == "sumrule") return cmd_sumrule(cfg);
        if (sub == "verify") return cmd_verify(cfg);
    } catch (const ncclab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
