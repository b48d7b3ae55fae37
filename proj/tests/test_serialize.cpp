#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ncclab/cli_config.hpp"
#include "ncclab/rng.hpp"
#include "ncclab/serialize.hpp"

using namespace ncclab;

namespace {

Potential random_spec(Rng& rng, int depth = 0) {
    const double pick = rng.uniform();
    if (depth >= 3 || pick < 0.35) {
        const int shape = static_cast<int>(rng.uniform() * 3.0);
        return Potential::bump(static_cast<BumpShape>(shape),
                               rng.uniform(-2.0, 2.0), rng.uniform(0.3, 2.0),
                               rng.unit_disc());
    }
    if (pick < 0.45) {
        std::vector<cplx> samples;
        const int n = 4 + static_cast<int>(rng.uniform() * 12);
        for (int i = 0; i < n; ++i) samples.push_back(rng.unit_disc());
        return Potential::grid_sampled(rng.uniform(-1.0, 1.0),
                                       rng.uniform(0.05, 0.4), samples);
    }
    if (pick < 0.55) return random_spec(rng, depth + 1).modulated(rng.uniform(-3.0, 3.0));
    if (pick < 0.65) return random_spec(rng, depth + 1).dilated(rng.uniform(0.4, 2.5));
    if (pick < 0.75) return random_spec(rng, depth + 1).translated(rng.uniform(-4.0, 4.0));
    if (pick < 0.85) return random_spec(rng, depth + 1).conjugated();
    if (pick < 0.95) return random_spec(rng, depth + 1).rotated(rng.unit_circle());
    // composite of two shifted bumps
    Potential a = random_spec(rng, depth + 1);
    Potential b = random_spec(rng, depth + 1);
    const double gap = rng.uniform(0.5, 3.0);
    const double off = a.support().hi - b.support().lo + gap;
    return Potential::composite({{a, 0.0}, {b, off}});
}

}  // namespace

TEST_CASE("potential JSON round trip", "[serialize]") {
    Rng rng(424242);
    for (int trial = 0; trial < 40; ++trial) {
        const Potential p = random_spec(rng);
        const json j = potential_to_json(p);
        const Potential q = potential_from_json(j);
        const Interval s = p.support();
        for (int i = 0; i < 24; ++i) {
            const double x =
                rng.uniform(s.lo - 1.0, s.hi + 1.0);
            CHECK(std::abs(p(x) - q(x)) < 1e-15 * (1.0 + std::abs(p(x))));
        }
        // serialized form is stable under the round trip
        CHECK(potential_to_json(q) == j);
    }
    CHECK_THROWS_AS(potential_from_json(json{{"type", "nonsense"}}),
                    std::invalid_argument);
}

TEST_CASE("seventeen digit round trip", "[serialize]") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        double v = std::ldexp(rng.uniform(-1.0, 1.0),
                              static_cast<int>(rng.uniform(-40.0, 40.0)));
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.1) == std::string("0.10000000000000001"));
}

TEST_CASE("scattering CSV layout", "[serialize]") {
    ScatteringCoeffs sc;
    sc.xi = {0.5, 1.0};
    sc.a = {cplx(1.25, -0.5), cplx(1.0, 0.0)};
    sc.b = {cplx(0.25, 0.5), cplx(0.0, 0.0)};
    sc.r = {sc.b[0] / sc.a[0], cplx(0.0)};
    const std::string csv = scattering_to_csv(sc);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "xi,re_a,im_a,re_b,im_b,re_r,im_r");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
    const json jj = scattering_to_json(sc);
    CHECK(jj.size() == 2);
    CHECK(complex_from_json(jj[0]["a"]) == sc.a[0]);
}

TEST_CASE("arg trace CSV layout", "[serialize]") {
    ArgTrace tr;
    tr.path = {cplx(2.0, 100.0), cplx(2.0, 10.0), cplx(2.0, 0.0)};
    tr.values = {cplx(1.01, 0.0), cplx(1.2, 0.4), cplx(0.3, 1.4)};
    tr.unwrapped_arg = {0.0, 0.2, 1.5};
    const std::string csv = arg_trace_to_csv(tr);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "eta,re_value,im_value,unwrapped_arg");
    std::string first;
    std::getline(in, first);
    CHECK(first.substr(0, 4) == "100,");
}

TEST_CASE("config parsing and round trip", "[serialize]") {
    // defaults validate for every experiment
    for (const std::string exp :
         {"figure2", "growth", "sample", "assemble", "weaktype", "sumrule",
          "verify"}) {
        ExperimentConfig c;
        c.experiment = exp;
        const json j = config_to_json(c);
        const ExperimentConfig parsed = parse_config(j);
        CHECK(config_to_json(parsed) == j);
    }

    // unknown keys are rejected at both levels
    json bad = config_to_json([] {
        ExperimentConfig c;
        c.experiment = "growth";
        return c;
    }());
    bad["surprise"] = 1;
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    json bad2 = config_to_json([] {
        ExperimentConfig c;
        c.experiment = "growth";
        return c;
    }());
    bad2["params"]["delta_list"] = {0.5};  // not a growth parameter
    CHECK_THROWS_AS(parse_config(bad2), ConfigError);

    // non-positive tolerances are rejected
    json bad3 = config_to_json([] {
        ExperimentConfig c;
        c.experiment = "verify";
        return c;
    }());
    bad3["tol"] = -1e-10;
    CHECK_THROWS_AS(parse_config(bad3), ConfigError);

    // malformed experiment
    CHECK_THROWS_AS(parse_config(json{{"experiment", "alchemy"}}), ConfigError);
}
