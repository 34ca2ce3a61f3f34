#pragma once

#include "fraclaws/coefficients.hpp"
#include "fraclaws/solver.hpp"
#include "fraclaws/torus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fraclaws {

/// Velocity-variable grid: num_bins cells on [xi_min, xi_max] with centers
/// xi_j = xi_min + (j + 1/2) dxi.
struct XiGrid {
    double xi_min = -1.0;
    double xi_max = 1.0;
    std::size_t num_bins = 64;

    double dxi() const { return (xi_max - xi_min) / static_cast<double>(num_bins); }
    double center(std::size_t j) const { return xi_min + (static_cast<double>(j) + 0.5) * dxi(); }
    /// Bin containing v; throws if v falls outside the grid.
    std::size_t bin_of(double v) const;
    bool covers(double v) const { return v >= xi_min && v <= xi_max; }
};

/// Grid covering the ranges of the given fields with a relative margin on
/// each side (at least 10% of the spread).
XiGrid make_xi_grid(const std::vector<const Field*>& fields, std::size_t num_bins,
                    double margin = 0.15);

struct KineticFunction {
    std::vector<std::uint8_t> indicator;  // row-major (x, xi), 1 iff u(x) > xi
    Field reconstruction;                 // int (f - 1_{0 > xi}) dxi, equals u within dxi

    std::uint8_t at(std::size_t i, std::size_t j, std::size_t num_bins) const {
        return indicator[i * num_bins + j];
    }
};

/// f(x_i, xi_j) = 1 iff u(x_i) > xi_j. Requires the grid to cover range(u).
KineticFunction kinetic_function(const Field& u, const XiGrid& xi);

struct Eta1Options {
    double r = 0.0;       // inner cutoff; 0 means the grid spacing
    double z_max = 50.0;  // outer truncation of the z quadrature
    bool parallel = true;
};

/// Nonlocal dissipation density
///   eta1(x, xi) = int |u(x+z) - xi| 1_{Conv{u(x), u(x+z)}}(xi) mu_lambda(z) dz
/// on the (x, xi-bin) grid; bin-boundary ties deposit zero (Conv is open).
std::vector<double> eta1_density(const Field& u, double lambda, const XiGrid& xi,
                                 const Eta1Options& opts = {});

/// Parabolic dissipation density |d/dx G(u)|^2 delta_{u(x)}(xi), G' = sigma;
/// the Dirac mass lands in the bin containing u(x), divided by dxi.
std::vector<double> eta2_density(const Field& u, const DiffusionSpec& diff, const XiGrid& xi);

/// Viscous dissipation density tau |u_x|^2 delta_{u(x)}(xi), binned likewise.
std::vector<double> m1_density(const Field& u, double tau, const XiGrid& xi);

/// Time-binned accumulation of the three dissipation measures over a
/// trajectory's snapshots (each snapshot weighted by its interval length).
struct KineticMeasureGrid {
    std::size_t nx = 0, nt = 0, nxi = 0;
    XiGrid xi;
    std::vector<double> eta1, eta2, m1;  // row-major (x, t, xi)

    double mass_outside(double radius) const;  // total eta1+eta2+m1 mass in |xi| > radius
    double total_mass() const;
    void write_csv(const std::string& path) const;
};

KineticMeasureGrid accumulate_measures(const Trajectory& traj, const SolverConfig& cfg,
                                       const XiGrid& xi, const Eta1Options& opts = {});

/// Tensor-product test function phi(x, xi) = X(x) Psi(xi) with X a single
/// trigonometric mode (x_mode = 0 -> 1, +n -> cos(nx), -n -> sin(nx)) and
/// Psi the C^2 bump (1 - t^2)^3 on |t| < 1, t = (xi - center)/halfwidth.
struct TestFunction {
    int x_mode = 0;
    double center = 0.0;
    double halfwidth = 1.0;

    double X(double x) const;
    double dX(double x) const;
    double d2X(double x) const;
    double Psi(double xi) const;
    double dPsi(double xi) const;
    std::string label() const;
};

/// Default battery: x modes {1, cos x, sin x, cos 2x} times 3 bumps spanning
/// the given xi range (12 functions).
std::vector<TestFunction> default_test_battery(double xi_lo, double xi_hi);

struct ResidualReport {
    std::string label;
    double lhs = 0.0;         // <f(T), phi> - <f(0), phi>
    double flux_term = 0.0;
    double diffusion_term = 0.0;
    double fractional_term = 0.0;
    double viscous_term = 0.0;
    double martingale_term = 0.0;
    double ito_term = 0.0;
    double measure_term = 0.0;  // -(m1 + eta1 + eta2)(d_xi phi)
    double defect = 0.0;
    double normalized_defect = 0.0;

    double rhs_sum() const;
};

/// Assembles every term of the approximate kinetic formulation for each test
/// function from a fully recorded trajectory (record_full). Time integrals
/// use left-endpoint quadrature, matching the Ito convention of the stepper.
/// The eta1 pairing is evaluated exactly: the xi-integral against d_xi Psi
/// collapses to psi(v) - psi(u) - Psi(u)(v - u) with psi' = Psi, and the z
/// integral of the resulting correlations against mu_lambda reduces to the
/// Fourier symbol, so opts.r / opts.z_max play no role here. The viscous
/// term and the parabolic dissipation measure include the scheme's
/// modified-equation viscosity h |F'(u)| / 2 in addition to tau, so the
/// defect measures consistency with the equation the scheme discretizes.
std::vector<ResidualReport> kinetic_residual(const Trajectory& traj, const SolverConfig& cfg,
                                             const std::vector<TestFunction>& battery,
                                             const Eta1Options& opts = {});

/// JSON dump of residual reports (per-phi term magnitudes and defects).
void write_residual_json(const std::vector<ResidualReport>& reports, const std::string& path);

}  // namespace fraclaws
