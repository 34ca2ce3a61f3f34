#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclaws {

/// Parse/validation failure; message carries the line number and, for unknown
/// keys, the closest known key as a suggestion.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fully resolved run description. Every field has a documented default and
/// is echoed into summary.json, making runs self-describing.
struct RunConfig {
    // [grid]
    std::size_t grid_m = 128;

    // [solver]
    double lambda = 0.5;
    bool fractional = true;
    double tau = 0.0;
    double dt = 0.0;  // 0: auto, 0.95 * CFL bound
    double t_end = 1.0;
    std::string scheme = "lax_friedrichs";  // or engquist_osher
    double cfl_safety = 0.4;
    std::uint64_t seed = 1;

    // [flux]
    std::string flux_name = "burgers";
    double flux_param = 1.0;
    bool flux_regularize = false;
    double flux_regularize_tau = 0.0;  // 0: solver tau

    // [diffusion]
    std::string diffusion_name = "zero";
    double diffusion_param = 1.0;
    double diffusion_gamma = 0.6;

    // [noise]
    std::string noise_name = "none";
    double noise_amp = 0.0;
    std::size_t noise_truncation = 0;

    // [initial]
    std::string initial_kind = "sin";  // sin | constant | step | file
    double initial_amplitude = 1.0;
    double initial_value = 0.0;
    std::string initial_path;

    // [experiment]
    std::string experiment = "simulate";
    int num_mc = 64;
    std::vector<double> times;
    double p = 4.0;
    std::string perturb_kind = "diffusion";
    std::vector<double> epsilons;
    double r1 = 1.0;
    double lambda_g1 = 1.0;
    double lambda_g2 = 1.0;
    double gamma_b = 0.0;  // 0: take the diffusion gamma
    double offset = 0.5;
    std::vector<double> taus;
    std::size_t xi_bins = 64;

    // [output]
    std::string out_dir = "out";
    bool dump_fields = false;
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Experiment dispatch. Writes summary.json plus experiment CSVs under
/// cfg.out_dir. Returns 0 on pass, 2 on assertion failure; faults propagate
/// as exceptions (the CLI maps them to exit 1).
int run(const RunConfig& cfg);

}  // namespace fraclaws
