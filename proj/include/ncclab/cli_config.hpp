#pragma once

#include <cstdint>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncclab/experiments.hpp"

namespace ncclab {

/// Raised on malformed configuration; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One experiment invocation: the experiment name plus the parameter map,
/// output location and reproducibility knobs. Unknown keys are rejected,
/// tolerances must be positive, and parse(serialize(c)) round-trips.
struct ExperimentConfig {
    std::string experiment;
    std::string out_dir{"out"};
    std::string format{"csv"};  // summary format: csv | json
    int threads{0};             // 0: resolve from env NCCLAB_THREADS or 1
    std::uint64_t seed{12345};
    double tol{1e-10};

    // experiment parameters (validated per experiment)
    std::vector<int> nu_list{8, 16, 32, 64, 128};
    double xi_lo{0.5}, xi_hi{1.0};
    int n_xi{5};
    int nu{64};
    double rho{0.0};  // 0: default 8 * nu
    std::vector<double> delta_list{0.2, 0.4, 0.8};
    std::vector<ScheduleEntry> schedule{{16, 0.3}, {64, 0.5}, {256, 0.8}};
    std::string mode{"both"};  // sumrule: krein | dirac | both

    int resolved_threads() const {
        if (threads > 0) return threads;
        if (const char* env = std::getenv("NCCLAB_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return v;
        }
        return 1;
    }
};

namespace config_detail {

inline void require_keys(const nlohmann::ordered_json& j,
                         const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

inline std::set<std::string> allowed_params(const std::string& experiment) {
    if (experiment == "figure2") return {};
    if (experiment == "growth") return {"nu_list", "xi_lo", "xi_hi", "n_xi"};
    if (experiment == "sample")
        return {"nu", "delta_list", "rho", "xi_lo", "xi_hi", "n_xi"};
    if (experiment == "assemble")
        return {"schedule", "xi_lo", "xi_hi", "n_xi"};
    if (experiment == "weaktype") return {"nu_list", "n_xi"};
    if (experiment == "sumrule") return {"mode", "delta_list"};
    if (experiment == "verify") return {};
    throw ConfigError("unknown experiment '" + experiment + "'");
}

}  // namespace config_detail

inline ExperimentConfig parse_config(const nlohmann::ordered_json& j) {
    ExperimentConfig c;
    config_detail::require_keys(
        j,
        {"experiment", "out_dir", "format", "threads", "seed", "tol", "params"},
        "config");
    if (!j.contains("experiment") || !j.at("experiment").is_string())
        throw ConfigError("config: missing experiment name");
    c.experiment = j.at("experiment").get<std::string>();
    const auto allowed = config_detail::allowed_params(c.experiment);
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
    if (c.format != "csv" && c.format != "json")
        throw ConfigError("config: format must be csv or json");
    if (j.contains("threads")) {
        c.threads = j.at("threads").get<int>();
        if (c.threads < 0) throw ConfigError("config: threads must be >= 0");
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tol")) {
        c.tol = j.at("tol").get<double>();
        if (!(c.tol > 0.0)) throw ConfigError("config: tolerances must be positive");
    }
    if (j.contains("params")) {
        const auto& p = j.at("params");
        config_detail::require_keys(p, allowed,
                                    "params of " + c.experiment);
        if (p.contains("nu_list")) {
            c.nu_list = p.at("nu_list").get<std::vector<int>>();
            if (c.nu_list.empty()) throw ConfigError("config: empty nu_list");
            for (std::size_t i = 0; i < c.nu_list.size(); ++i) {
                if (c.nu_list[i] < 1 ||
                    (i > 0 && c.nu_list[i] <= c.nu_list[i - 1]))
                    throw ConfigError("config: nu_list must strictly increase");
            }
        }
        if (p.contains("xi_lo")) c.xi_lo = p.at("xi_lo").get<double>();
        if (p.contains("xi_hi")) c.xi_hi = p.at("xi_hi").get<double>();
        if (!(c.xi_hi > c.xi_lo))
            throw ConfigError("config: xi window must be nonempty");
        if (p.contains("n_xi")) {
            c.n_xi = p.at("n_xi").get<int>();
            if (c.n_xi < 1) throw ConfigError("config: n_xi must be >= 1");
        }
        if (p.contains("nu")) {
            c.nu = p.at("nu").get<int>();
            if (c.nu < 1) throw ConfigError("config: nu must be >= 1");
        }
        if (p.contains("rho")) {
            c.rho = p.at("rho").get<double>();
            if (!(c.rho > 0.0)) throw ConfigError("config: rho must be positive");
        }
        if (p.contains("delta_list")) {
            c.delta_list = p.at("delta_list").get<std::vector<double>>();
            if (c.delta_list.empty())
                throw ConfigError("config: empty delta_list");
            for (double d : c.delta_list)
                if (!(d > 0.0) || d >= 1.0)
                    throw ConfigError("config: deltas must lie in (0, 1)");
        }
        if (p.contains("schedule")) {
            c.schedule.clear();
            for (const auto& e : p.at("schedule")) {
                config_detail::require_keys(e, {"nu", "delta"}, "schedule entry");
                ScheduleEntry s;
                s.nu = e.at("nu").get<int>();
                s.delta = e.at("delta").get<double>();
                if (s.nu < 1 || !(s.delta > 0.0) || s.delta >= 1.0)
                    throw ConfigError("config: bad schedule entry");
                c.schedule.push_back(s);
            }
            if (c.schedule.empty()) throw ConfigError("config: empty schedule");
        }
        if (p.contains("mode")) {
            c.mode = p.at("mode").get<std::string>();
            if (c.mode != "krein" && c.mode != "dirac" && c.mode != "both")
                throw ConfigError("config: mode must be krein, dirac or both");
        }
    }
    return c;
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = c.experiment;
    j["out_dir"] = c.out_dir;
    j["format"] = c.format;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    j["tol"] = c.tol;
    nlohmann::ordered_json p;
    const auto allowed = config_detail::allowed_params(c.experiment);
    if (allowed.count("nu_list")) p["nu_list"] = c.nu_list;
    if (allowed.count("xi_lo")) {
        p["xi_lo"] = c.xi_lo;
        p["xi_hi"] = c.xi_hi;
    }
    if (allowed.count("n_xi")) p["n_xi"] = c.n_xi;
    if (allowed.count("nu")) p["nu"] = c.nu;
    if (allowed.count("rho") && c.rho > 0.0) p["rho"] = c.rho;
    if (allowed.count("delta_list")) p["delta_list"] = c.delta_list;
    if (allowed.count("schedule")) {
        nlohmann::ordered_json entries = nlohmann::ordered_json::array();
        for (const ScheduleEntry& s : c.schedule)
            entries.push_back({{"nu", s.nu}, {"delta", s.delta}});
        p["schedule"] = std::move(entries);
    }
    if (allowed.count("mode")) p["mode"] = c.mode;
    j["params"] = std::move(p);
    return j;
}

}  // namespace ncclab
