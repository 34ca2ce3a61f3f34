#pragma once

#include "fraclaws/coefficients.hpp"
#include "fraclaws/rng.hpp"
#include "fraclaws/torus.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fraclaws {

enum class FluxScheme { lax_friedrichs, engquist_osher };

/// Thrown when a state turns non-finite during time stepping.
struct BlowUpError : std::runtime_error {
    std::uint64_t step;
    double time;
    BlowUpError(std::uint64_t s, double t);
};

/// Configuration of one IMEX Euler-Maruyama run. Construction enforces
///   dt <= cfl_safety * min( h / L_F, h^2 / (2 (max A + 2 tau)) )
/// with L_F the recorded Lipschitz constant of the (regularized) flux.
struct SolverConfig {
    TorusGrid grid;
    double lambda = 0.5;
    bool fractional_on = true;
    double viscosity = 0.0;  // tau
    double dt = 0.0;
    double t_end = 1.0;
    FluxSpec flux;
    double flux_lipschitz = 0.0;  // L_F over the expected state range
    DiffusionSpec diffusion;
    NoiseSpec noise;
    FluxScheme scheme = FluxScheme::lax_friedrichs;
    std::uint64_t seed = 0;
    double cfl_safety = 0.4;

    double cfl_bound() const;
    void validate() const;
};

struct StepDiagnostics {
    double t = 0.0;
    double mass = 0.0;
    double l1 = 0.0, l2 = 0.0, lp = 0.0, tv = 0.0;
    double viscous_dissipation = 0.0;  // tau * ||grad u||_2^2
};

/// Per-step record kept when a trajectory is captured for kinetic-residual
/// assembly: the pre-step state, the step size, and the aggregated noise
/// draw S_m = sum_k w_k dW_k^m (the family is separable by construction).
struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    double noise_sum = 0.0;
};

struct Trajectory {
    std::vector<double> times;     // snapshot times, strictly increasing
    std::vector<Field> states;     // snapshots
    std::vector<StepDiagnostics> diagnostics;  // per step (when enabled)
    // full per-step record (when enabled); full_states has one extra entry
    // for the final state
    std::vector<Field> full_states;
    std::vector<StepRecord> steps;
};

struct SimulateOptions {
    bool record_diagnostics = false;
    double diagnostics_p = 4.0;
    bool record_full = false;  // keep every pre-step state + noise draws
};

/// One IMEX step: explicit conservative flux + explicit degenerate diffusion
/// (second difference of B) + Euler-Maruyama noise at the pre-step state,
/// then the implicit spectral solve 1 / (1 + dt (psi_lambda(n) + tau n^2)).
Field step(const Field& u, const SolverConfig& cfg, const SamplePath& path, std::uint64_t m,
           double dt_step);

Trajectory simulate_path(const SolverConfig& cfg, const Field& u0, const SamplePath& path,
                         const std::vector<double>& snapshot_times,
                         const SimulateOptions& opts = {});

struct CoupledResult {
    Trajectory a;
    Trajectory b;
    std::vector<double> distances;  // L1 distance at each snapshot time
};

/// Advances both configurations with identical Brownian increments.
/// Requires matching grids and dt; the shared path truncation must cover
/// both noise truncations.
CoupledResult coupled_simulate(const SolverConfig& cfg_a, const SolverConfig& cfg_b,
                               const Field& u0a, const Field& u0b, const SamplePath& path,
                               const std::vector<double>& snapshot_times);

struct CauchyEntry {
    double tau_coarse = 0.0;
    double tau_fine = 0.0;
    double mean_distance = 0.0;
    double std_error = 0.0;
};

struct ViscositySweepOptions {
    /// Regularize the flux as F^tau with the viscosity parameter (the linked
    /// default); tau = 0 entries use the raw flux.
    bool link_flux_regularization = true;
    double state_bound = 2.0;  // radius for Lipschitz sampling of raw fluxes
};

/// Monte Carlo Cauchy table: for consecutive (tau_n, tau_k) pairs, the
/// estimate of E || u^{tau_n}(t_end) - u^{tau_k}(t_end) ||_L1 over num_mc
/// shared paths (same seed list across pairs).
std::vector<CauchyEntry> viscosity_sweep(const SolverConfig& cfg_template,
                                         const std::vector<double>& tau_list, const Field& u0,
                                         int num_mc, const ViscositySweepOptions& opts = {});

}  // namespace fraclaws
