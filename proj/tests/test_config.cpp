#include "doctest.h"

#include "fraclaws/config.hpp"

#include <string>

using namespace fraclaws;

namespace {

// true iff parsing `text` throws a ConfigError whose message contains `needle`
bool fails_with(const std::string& text, const std::string& needle) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("empty config yields the documented defaults") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.grid_m == 128);
    CHECK(cfg.lambda == 0.5);
    CHECK(cfg.fractional);
    CHECK(cfg.tau == 0.0);
    CHECK(cfg.dt == 0.0);
    CHECK(cfg.scheme == "lax_friedrichs");
    CHECK(cfg.flux_name == "burgers");
    CHECK(cfg.diffusion_name == "zero");
    CHECK(cfg.noise_name == "none");
    CHECK(cfg.initial_kind == "sin");
    CHECK(cfg.experiment == "simulate");
    CHECK(cfg.num_mc == 64);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("a full config round-trips every section") {
    const RunConfig cfg = parse_config(
        "[grid]\n"
        "m = 256\n"
        "[solver]\n"
        "lambda = 0.75\n"
        "fractional = on\n"
        "tau = 0.01\n"
        "dt = 1e-4\n"
        "t_end = 0.3\n"
        "scheme = engquist_osher\n"
        "seed = 42\n"
        "[flux]\n"
        "name = linear\n"
        "param = 2.0\n"
        "regularize = true\n"
        "[diffusion]\n"
        "name = degenerate-power\n"
        "param = 0.5\n"
        "gamma = 0.7\n"
        "[noise]\n"
        "name = multiplicative\n"
        "amp = 0.1\n"
        "truncation = 8\n"
        "[initial]\n"
        "kind = mixed\n"
        "value = 0.3\n"
        "[experiment]\n"
        "name = contraction\n"
        "num_mc = 16\n"
        "times = 0.1, 0.2, 0.3\n"
        "[output]\n"
        "dir = results\n"
        "dump_fields = true\n");
    CHECK(cfg.grid_m == 256);
    CHECK(cfg.lambda == 0.75);
    CHECK(cfg.tau == 0.01);
    CHECK(cfg.scheme == "engquist_osher");
    CHECK(cfg.seed == 42);
    CHECK(cfg.flux_name == "linear");
    CHECK(cfg.flux_param == 2.0);
    CHECK(cfg.flux_regularize);
    CHECK(cfg.diffusion_gamma == 0.7);
    CHECK(cfg.noise_truncation == 8);
    CHECK(cfg.initial_kind == "mixed");
    CHECK(cfg.initial_value == 0.3);
    CHECK(cfg.experiment == "contraction");
    CHECK(cfg.num_mc == 16);
    REQUIRE(cfg.times.size() == 3);
    CHECK(cfg.times[1] == 0.2);
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.dump_fields);
}

TEST_CASE("comments and blank lines are ignored") {
    const RunConfig cfg = parse_config(
        "# leading comment\n"
        "\n"
        "[grid]\n"
        "; alt comment style\n"
        "m = 64\n");
    CHECK(cfg.grid_m == 64);
}

TEST_CASE("lambda outside (0,1) names the valid interval") {
    CHECK(fails_with("[solver]\nlambda = 1.5\n", "(0,1)"));
    CHECK(fails_with("[solver]\nlambda = 0\n", "solver.lambda"));
}

TEST_CASE("misspelled keys get a closest-match suggestion") {
    CHECK(fails_with("[solver]\nlamda = 0.5\n", "did you mean solver.lambda?"));
    CHECK(fails_with("[noise]\ntruncaton = 4\n", "did you mean noise.truncation?"));
}

TEST_CASE("structural errors carry line numbers") {
    CHECK(fails_with("[nosuch]\nx = 1\n", "line 1"));
    CHECK(fails_with("[nosuch]\nx = 1\n", "unknown section"));
    CHECK(fails_with("[grid]\nm 128\n", "expected key = value"));
    CHECK(fails_with("m = 128\n", "key before any [section] header"));
    CHECK(fails_with("[grid]\nm =\n", "empty value"));
    CHECK(fails_with("[grid]\n[oops\n", "unterminated section header"));
}

TEST_CASE("scalar parse errors are precise") {
    CHECK(fails_with("[solver]\ntau = fast\n", "not a number"));
    CHECK(fails_with("[solver]\ndt = 0.1x\n", "trailing characters"));
    CHECK(fails_with("[solver]\nfractional = maybe\n", "expected true/false"));
    CHECK(fails_with("[experiment]\ntimes = 0.1,,0.3\n", "empty list element"));
}

TEST_CASE("semantic validation rejects out-of-domain values") {
    CHECK(fails_with("[grid]\nm = 100\n", "power of two"));
    CHECK(fails_with("[experiment]\nnum_mc = 1\n", "num_mc"));
    CHECK(fails_with("[experiment]\np = 1.5\n", "must be >= 2"));
    CHECK(fails_with("[initial]\nkind = gaussian\n", "not in {"));
    CHECK(fails_with("[noise]\nname = multiplicative\namp = 0.1\n", "noise.truncation"));
    CHECK(fails_with("[experiment]\nname = rates\nkind = entropy\nepsilons = 0.1\n",
                     "experiment.kind"));
    CHECK(fails_with("[experiment]\nname = rates\n", "epsilons"));
    CHECK(fails_with("[experiment]\nname = viscosity-sweep\n", "taus"));
    CHECK(fails_with("[initial]\nkind = file\n", "initial.path"));
    CHECK(fails_with("[solver]\ncfl_safety = 1.5\n", "cfl_safety"));
    CHECK(fails_with("[solver]\nscheme = upwind\n", "solver.scheme"));
}

TEST_CASE("missing config files raise ConfigError") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/run.ini"), ConfigError);
}
