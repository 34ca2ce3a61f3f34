#pragma once

#include "fraclaws/coefficients.hpp"

#include <string>
#include <vector>

namespace fraclaws {

/// Built-in flux functions:
///   zero, linear (F = p*xi), burgers (F = xi^2/2, scaled by p)
FluxSpec make_flux(const std::string& name, double param = 1.0);

/// Built-in diffusion roots:
///   zero, constant (sigma = p), degenerate-power (sigma = p*min(|xi|^g, 1)),
///   degenerate-band (sigma = p outside |xi|<=1/2, 0 inside; gamma check fails)
DiffusionSpec make_diffusion(const std::string& name, double param = 1.0, double gamma = 0.6);

/// Built-in noise families with K coefficients and k^{-2}-decaying weights
/// normalized to unit l2 mass, so (sum_k beta_k^2)^{1/2} = amp * |base(u)|:
///   none, multiplicative (base = amp*u), additive (base = amp),
///   bounded-multiplicative (base = amp * u / (1 + u^2))
NoiseSpec make_noise(const std::string& name, double amp, std::size_t truncation);

/// Tabulated coefficients from CSV rows "xi,F,sigma" (no header required;
/// rows starting with a non-numeric field are skipped). Linear interpolation,
/// linear extension of F and clamped sigma outside the table.
struct TabulatedCoefficients {
    FluxSpec flux;
    DiffusionSpec diffusion;
};
TabulatedCoefficients load_coefficients_csv(const std::string& path, double gamma = 1.0);

}  // namespace fraclaws
