#pragma once

#include "fraclaws/torus.hpp"

#include <vector>

namespace fraclaws {

/// Quadrature layout for the singular-integral realization of g^lambda:
/// the z axis is split at the inner cutoff r, covered by a geometric grid
/// inside and a growth-capped geometric grid outside up to z_max.
struct QuadratureNodes {
    double r = 0.0;
    double z_max = 50.0;
    std::vector<double> z;  // midpoints, z > 0
    std::vector<double> w;  // panel widths
    std::size_t inner_count = 0;  // nodes with z < r use the symmetrized form
};

QuadratureNodes make_quadrature_nodes(double r, double z_max);

/// Lambda-dependent pieces of the Levy kernel mu_lambda(z) = |z|^{-1-2 lambda}.
struct LevyKernel {
    double lambda = 0.5;
    double inner_cutoff = 0.1;
    double symbol_constant = 0.0;  // c(lambda) = int (1-cos z) mu_lambda dz

    LevyKernel(double lambda, double inner_cutoff);
    double density(double z) const;
};

/// c(lambda), computed once per lambda by adaptive quadrature (split at
/// |z| = 1; series for 1 - cos z near 0; integration-by-parts tail) and cached.
double symbol_constant(double lambda);

/// psi_lambda(n) = c(lambda) |n|^{2 lambda}; psi(0) = 0.
double spectral_symbol(double lambda, long n);

/// Spectral realization: Fourier multiplier psi_lambda(|n|). Real output,
/// zero mean.
Field apply_spectral(const Field& f, double lambda);

struct QuadratureResult {
    Field value;
    /// Recorded bound on the neglected |z| > z_max remainder after the
    /// mean-based tail correction: 2 * max|f - mean(f)| * mu(z_max) tail shape.
    double tail_error_bound = 0.0;
};

/// Singular-integral realization. Inner |z| < r: symmetrized second
/// difference (spectrally evaluated, cancellation-free) against mu on a
/// geometric grid. Outer r <= |z| <= z_max: first differences of the
/// trigonometric interpolant. Tail |z| > z_max: analytic correction
/// (mean(f) - f(x)) * tail mass, with the residual bound recorded.
/// Requires r in (0, pi).
QuadratureResult apply_quadrature_full(const Field& f, double lambda, double r,
                                       double z_max = 50.0);
Field apply_quadrature(const Field& f, double lambda, double r, double z_max = 50.0);

/// Serial reference path: identical quadrature, but outer-part field values
/// are obtained by per-point trigonometric interpolation instead of spectral
/// shifts, with no OpenMP. Kept for testing and the kernel benchmark.
Field apply_quadrature_serial(const Field& f, double lambda, double r, double z_max = 50.0);

/// int_{|z| <= r1} z^2 d|mu_lambda - mu_beta|(z), in closed form (the two
/// kernel branches cross only at |z| = 1).
double kernel_difference_second_moment(double lambda, double beta, double r1);

/// int_{|z| > r1} ||u0(.+z) - u0||_L1 d|mu_lambda - mu_beta|(z): geometric
/// grid to z_max, then the periodic average of the translation modulus
/// against the analytic tail mass (bounded by 2 ||u0||_L1 * tail mass).
double tail_translation_term(const Field& u0, double lambda, double beta, double r1,
                             double z_max = 500.0);

/// CSV dump of the symbol table (n, psi_lambda(n)) for n = 0..n_max.
void write_symbol_csv(double lambda, long n_max, const std::string& path);

}  // namespace fraclaws
