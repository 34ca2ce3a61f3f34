#pragma once

#include "fraclaws/solver.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclaws {

/// Monte Carlo point estimate with its standard error.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t num_samples = 0;
};

/// Sample mean and stderr = sample sd / sqrt(n); requires n >= 2.
McEstimate make_estimate(const std::vector<double>& samples);

/// Structural exponents of the coefficient family entering the continuous
/// dependence rate.
struct RatePrediction {
    double lambda_g1 = 1.0;  // flux-modulus exponent
    double lambda_g2 = 1.0;  // noise exponent
    double gamma_b = 1.0;    // diffusion Holder exponent, > 1/2

    double predicted_exponent() const;
};

struct RateFit {
    std::vector<double> sizes;
    std::vector<McEstimate> distances;
    double fitted_slope = 0.0;
    double slope_std_error = 0.0;
    std::size_t usable_points = 0;
};


struct ContractionResult {
    std::vector<double> times;
    std::vector<McEstimate> distance;
    double initial_distance = 0.0;
    bool pass = false;
    std::string failure;  // names the violating time on failure
};

/// E || uA(t) - uB(t) ||_L1 over coupled paths; asserts the L1-contraction
/// bound mean <= d0 * 1.05 + 3 SE at every recorded time.
ContractionResult run_contraction(const SolverConfig& cfg, const Field& u0a, const Field& u0b,
                                  int num_mc, const std::vector<double>& times);

struct BvResult {
    std::vector<double> times;
    std::vector<McEstimate> tv;
    double initial_tv = 0.0;
    bool pass = false;
    std::string failure;
};

/// E[TV(u(t))]; asserts mean <= TV(u0) * 1.05 + 3 SE at every time. Requires
/// spatially homogeneous noise.
BvResult run_bv(const SolverConfig& cfg, const Field& u0, int num_mc,
                const std::vector<double>& times);

struct MomentResult {
    double p = 2.0;
    McEstimate sup_lp;            // E sup_t ||u(t)||_p^p over every step
    McEstimate h_lambda_integral; // E int ||u(t)||_{H^lambda}^2 dt
    double implied_constant = 0.0;  // sup_lp.mean / (1 + ||u0||_p^p)
};

/// Pathwise moment estimates; p in [2, inf). Blow-up propagates.
MomentResult run_moments(const SolverConfig& cfg, const Field& u0, int num_mc, double p);

struct EnergyLedger {
    double initial_l2sq = 0.0;
    double final_l2sq = 0.0;
    double fractional_dissipation = 0.0;  // int <u, g^lambda u> dt
    double parabolic_dissipation = 0.0;   // int || sigma(u) u_x ||_2^2 dt
    double viscous_dissipation = 0.0;     // tau int || u_x ||_2^2 dt
    double closure_error = 0.0;           // relative defect of the L2 identity
};

/// Deterministic discrete energy bookkeeping; requires zero noise truncation.
EnergyLedger energy_ledger(const SolverConfig& cfg, const Field& u0);

enum class PerturbKind { initial, lambda, flux, noise, diffusion };

PerturbKind perturb_kind_from(const std::string& name);
std::string to_string(PerturbKind k);

struct ContinuousDependenceResult {
    PerturbKind kind = PerturbKind::initial;
    double t_eval = 0.0;
    RatePrediction prediction;
    double predicted = 0.0;
    RateFit fit;
    std::vector<double> epsilons;
    std::vector<double> envelope;        // C_fit * size^predicted per entry
    double envelope_constant = 0.0;
    bool degenerate = false;  // fewer than 4 usable points / under a decade
    bool pass = false;
    std::string failure;
};

/// Quantitative continuous-dependence rate study: builds the perturbed
/// configuration per kind, couples paths, estimates E||u - v||_L1(t_end),
/// converts each epsilon to its composite perturbation size (kernel-difference
/// terms for kind=lambda), and fits the log-log slope. Asserts
/// slope >= predicted - 0.15. A fit with under 4 usable points above the
/// noise floor, or under a decade of spread, is reported as degenerate.
ContinuousDependenceResult run_continuous_dependence(PerturbKind kind, const SolverConfig& cfg,
                                                     const Field& u0, const RatePrediction& rp,
                                                     const std::vector<double>& eps_list,
                                                     int num_mc, double r1 = 1.0);

}  // namespace fraclaws
