#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fraclaws {

/// Scalar flux F with its derivative and the growth metadata used by the
/// hypothesis checks: |F'(xi)| <= growth_constant * (1 + |xi|^{growth_exponent-1}).
struct FluxSpec {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    double growth_exponent = 2.0;  // q* >= 1
    double growth_constant = 1.0;
    double holder_exponent_f1 = 1.0;  // modulus exponent, optional refinement
    /// Finite Lipschitz constant when known (always set for regularized
    /// fluxes, which have compact support).
    std::optional<double> lipschitz;

    /// Sampled max |F'| over [-radius, radius]; falls back to the recorded
    /// Lipschitz constant when one is present and smaller samples are moot.
    double lipschitz_on(double radius) const;
};

/// Scalar diffusion: sigma >= 0 bounded, A = sigma^2, and B with B' = A,
/// B(0) = 0, precomputed by quadrature (the solver discretizes
/// div(A(u) grad u) as the second difference of B(u)).
struct DiffusionSpec {
    std::string name;
    std::function<double(double)> sigma;
    std::function<double(double)> a_of;
    std::function<double(double)> big_b;
    double holder_exponent = 1.0;  // gamma > 1/2
    double holder_constant = 1.0;
    double sigma_sup = 0.0;

    double a_sup() const { return sigma_sup * sigma_sup; }
};

/// Truncated noise family beta_k(x,u) = weights[k] * base(x,u), k < K.
struct NoiseSpec {
    std::string name;
    std::vector<double> weights;
    std::function<double(double, double)> base;  // (x, u)
    double d0 = 1.0;  // linear-growth constant of (sum beta_k^2)
    double d1 = 1.0;  // continuity constant
    std::function<double(double)> modulus;  // h: nondecreasing, h(0)=0, 0<=h<=1
    bool spatially_homogeneous = true;

    std::size_t truncation() const { return weights.size(); }
    double beta(std::size_t k, double x, double u) const { return weights[k] * base(x, u); }
    /// sum_k beta_k(x,u)^2
    double beta_sq(double x, double u) const;
    double weight_sq_sum() const;
};

/// Mollified and truncated flux F^tau = (F * kappa_tau) * S_tau, evaluated by
/// interpolation on a xi-grid of step tau/8. kappa is the unit-mass bump
/// exp(-1/(1-s^2)); S_tau is a smoothstep equal to 1 on [-1/tau, 1/tau] and 0
/// outside [-1/tau-1, 1/tau+1]. The returned spec records the finite
/// Lipschitz constant of the tabulated F^tau.
FluxSpec regularize_flux(const FluxSpec& spec, double tau);

struct HypothesisEntry {
    std::string hypothesis;
    double worst_ratio = 0.0;  // observed bound / claimed bound
    bool pass = false;
};

struct HypothesisReport {
    std::vector<HypothesisEntry> entries;
    bool all_pass() const;
};

/// Sampled verification of (F.1), the sigma Holder bound, and the noise
/// bounds on the given xi grid. Failures are report entries, not faults.
HypothesisReport check_hypotheses(const FluxSpec& flux, const DiffusionSpec& diff,
                                  const NoiseSpec& noise, const std::vector<double>& xi_grid);

/// max over sampled xi and |zeta| <= delta of
/// |F'(xi) - F'(xi+zeta)| / (1 + |xi|^{q*-1}).
double flux_modulus(const FluxSpec& spec, double delta, const std::vector<double>& xi_grid);

/// Tabulated antiderivative helper used for B (B' = A) and the
/// Engquist-Osher splittings: cumulative Simpson on a dense grid with linear
/// interpolation and linear extension outside the table.
class TabulatedAntiderivative {
  public:
    TabulatedAntiderivative() = default;
    TabulatedAntiderivative(const std::function<double(double)>& integrand, double radius,
                            std::size_t num_cells);
    double operator()(double xi) const;

  private:
    double lo_ = 0.0, step_ = 0.0;
    std::vector<double> table_;      // antiderivative values, zero at xi=0
    std::vector<double> slope_;      // integrand at table nodes (for extension)
};

}  // namespace fraclaws
