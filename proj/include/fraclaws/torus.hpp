#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

namespace fraclaws {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on [0, 2*pi). The point count must be a power of
/// two and at least 8.
struct TorusGrid {
    std::size_t m = 0;

    TorusGrid() = default;
    explicit TorusGrid(std::size_t num_points);

    double length() const { return kTwoPi; }
    double spacing() const { return kTwoPi / static_cast<double>(m); }
    double x(std::size_t i) const { return spacing() * static_cast<double>(i); }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

/// Real grid function: values[i] = u(x_i).
struct Field {
    TorusGrid grid;
    std::vector<double> values;

    Field() = default;
    Field(TorusGrid g, std::vector<double> v);
    explicit Field(TorusGrid g, double fill = 0.0);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const;
};

/// Discrete Fourier image of a Field. Coefficients are stored in FFT layout:
/// index j holds mode n = j for j <= m/2 and n = j - m for j > m/2.
struct SpectralField {
    TorusGrid grid;
    std::vector<std::complex<double>> coefficients;

    /// Coefficient of mode n (wraps negative modes into FFT layout).
    std::complex<double> coeff(long n) const;
    /// Signed mode number of storage index j.
    long mode_of(std::size_t j) const;
};

/// Forward transform with the convention u_hat(n) = (1/m) sum_i u_i exp(-i n x_i).
SpectralField dft(const Field& f);
/// Inverse of dft; returns the real part of the mode sum.
Field idft(const SpectralField& s);

/// Sentinel for the sup norm in lp_norm.
inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// (h * sum |u_i|^p)^(1/p); p = kInfNorm returns max |u_i|. Requires p >= 1.
double lp_norm(const Field& f, double p);

double mean(const Field& f);

/// Discrete total variation sum_i |u_{i+1} - u_i| with periodic wraparound.
/// No h factor: limits to int |u_x| for smooth u and counts jump heights
/// exactly for piecewise-constant u.
double total_variation(const Field& f);

/// Homogeneous seminorm (sum_n |n|^{2 lambda} |u_hat(n)|^2)^{1/2}, lambda in (0,1).
double h_lambda_seminorm(const Field& f, double lambda);

/// Full Sobolev norm (sum_n (1+|n|^2)^lambda |u_hat(n)|^2)^{1/2}.
double h_lambda_norm(const Field& f, double lambda);

/// Trigonometric interpolant evaluation at an arbitrary point (periodic).
double trig_eval(const SpectralField& s, double x);

/// Periodic shift: returns the field x -> u(x + z), evaluated through the
/// trigonometric interpolant (spectral phase shift).
Field shift(const SpectralField& s, double z);

// --- arithmetic helpers -----------------------------------------------------

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double c, const Field& f);

// --- serialization ----------------------------------------------------------

/// Flat binary layout: m as little-endian uint64, then m little-endian f64.
void write_field_binary(const Field& f, std::ostream& out);
Field read_field_binary(std::istream& in);
void write_field_binary(const Field& f, const std::string& path);
Field read_field_binary(const std::string& path);

/// CSV rows: index,x,value (with header).
void write_field_csv(const Field& f, std::ostream& out);
void write_field_csv(const Field& f, const std::string& path);

}  // namespace fraclaws
