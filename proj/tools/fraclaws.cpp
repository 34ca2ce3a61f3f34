#include "fraclaws/config.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"fraclaws: numerical laboratory for stochastic degenerate fractional "
                 "conservation laws on the torus"};
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    app.add_option("config", config_path, "path to the run configuration file")->required();
    app.add_option("--seed", seed, "override [solver] seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--out", out_dir, "override [output] dir");
    CLI11_PARSE(app, argc, argv);

    try {
        fraclaws::RunConfig cfg = fraclaws::parse_config_file(config_path);
        if (seed_set) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        const int rc = fraclaws::run(cfg);
        std::fprintf(stderr, "%s (exit %d)\n", rc == 0 ? "PASS" : "ASSERTION FAILURE", rc);
        return rc;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
