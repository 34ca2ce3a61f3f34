#include "doctest.h"

#include "fraclaws/coefficients.hpp"
#include "fraclaws/registry.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace fraclaws;

namespace {

std::vector<double> xi_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace

TEST_CASE("regularized linear flux vanishes at zero by symmetry") {
    const FluxSpec reg = regularize_flux(make_flux("linear", 2.0), 0.1);
    CHECK(std::abs(reg.eval(0.0)) < 1e-12);
}

TEST_CASE("regularized Burgers flux stays within O(tau^2) at xi = 1") {
    const double tau = 0.05;
    const FluxSpec reg = regularize_flux(make_flux("burgers"), tau);
    // mollifying xi^2/2 against an even unit-mass kernel of width tau adds
    // exactly half the kernel's second moment, which is below tau^2 / 2
    CHECK(std::abs(reg.eval(1.0) - 0.5) < tau * tau);
}

TEST_CASE("regularized flux is exactly zero outside the truncation support") {
    const double tau = 0.25;
    const FluxSpec reg = regularize_flux(make_flux("burgers"), tau);
    CHECK(reg.eval(1.0 / tau + 1.0 + 0.05) == 0.0);
    CHECK(reg.eval(-(1.0 / tau + 1.2)) == 0.0);
}

TEST_CASE("regularized Burgers converges pointwise as tau -> 0") {
    const FluxSpec base = make_flux("burgers");
    const FluxSpec reg = regularize_flux(base, 0.01);
    double worst = 0.0;
    for (double xi : xi_grid(-2.0, 2.0, 401))
        worst = std::max(worst, std::abs(reg.eval(xi) - base.eval(xi)));
    CHECK(worst < 1e-3);
}

TEST_CASE("recorded Lipschitz constant bounds the sampled slope of F^tau") {
    const FluxSpec reg = regularize_flux(make_flux("burgers"), 0.1);
    REQUIRE(reg.lipschitz.has_value());
    const double radius = 1.0 / 0.1 + 1.5;
    double steep = 0.0;
    const auto grid = xi_grid(-radius, radius, 4001);
    for (std::size_t i = 1; i < grid.size(); ++i)
        steep = std::max(steep, std::abs(reg.eval(grid[i]) - reg.eval(grid[i - 1])) /
                                    (grid[i] - grid[i - 1]));
    CHECK(steep <= *reg.lipschitz * (1.0 + 1e-9));
}

TEST_CASE("hypothesis report: Burgers growth bound passes") {
    const FluxSpec flux = make_flux("burgers");
    const DiffusionSpec diff = make_diffusion("degenerate-power", 1.0, 0.6);
    const NoiseSpec noise = make_noise("bounded-multiplicative", 0.2, 8);
    const HypothesisReport rep =
        check_hypotheses(flux, diff, noise, xi_grid(-10.0, 10.0, 801));
    CHECK(rep.all_pass());
    for (const auto& e : rep.entries) CHECK(e.worst_ratio <= 1.0 + 1e-9);
}

TEST_CASE("hypothesis report: a jump sigma fails the Holder entry") {
    DiffusionSpec diff = make_diffusion("degenerate-band", 1.0, 0.6);
    const HypothesisReport rep = check_hypotheses(
        make_flux("burgers"), diff, make_noise("none", 0.0, 0), xi_grid(-2.0, 2.0, 801));
    CHECK_FALSE(rep.all_pass());
    bool holder_failed = false;
    for (const auto& e : rep.entries)
        if (!e.pass && e.hypothesis.find("older") != std::string::npos) holder_failed = true;
    CHECK(holder_failed);
}

TEST_CASE("hypothesis checks are monotone in the claimed constants") {
    FluxSpec flux = make_flux("burgers");
    const auto grid = xi_grid(-5.0, 5.0, 501);
    const HypothesisReport before = check_hypotheses(
        flux, make_diffusion("constant", 0.5), make_noise("bounded-multiplicative", 0.1, 4), grid);
    flux.growth_constant *= 10.0;
    NoiseSpec noise = make_noise("bounded-multiplicative", 0.1, 4);
    noise.d0 *= 10.0;
    noise.d1 *= 10.0;
    const HypothesisReport after =
        check_hypotheses(flux, make_diffusion("constant", 0.5), noise, grid);
    REQUIRE(before.all_pass());
    CHECK(after.all_pass());
}

TEST_CASE("flux modulus: linear flux has zero modulus") {
    CHECK(flux_modulus(make_flux("linear", 3.0), 0.5, xi_grid(-5.0, 5.0, 201)) == 0.0);
}

TEST_CASE("flux modulus: Burgers modulus equals delta") {
    const double mod = flux_modulus(make_flux("burgers"), 0.1, xi_grid(-5.0, 5.0, 501));
    CHECK(mod == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("flux modulus: square-root derivative scales like sqrt(delta)") {
    FluxSpec spec;
    spec.name = "sqrt-deriv";
    spec.eval = [](double xi) { return 2.0 / 3.0 * std::pow(std::abs(xi), 1.5); };
    spec.deriv = [](double xi) { return std::sqrt(std::abs(xi)); };
    spec.growth_exponent = 2.0;
    const double mod = flux_modulus(spec, 0.01, xi_grid(-1.0, 1.0, 2001));
    CHECK(mod == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("noise family: weights normalized, beta_sq separable") {
    const NoiseSpec noise = make_noise("multiplicative", 0.3, 8);
    CHECK(noise.truncation() == 8);
    CHECK(noise.weight_sq_sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(noise.beta_sq(0.7, 2.0) == doctest::Approx(0.09 * 4.0).epsilon(1e-12));
    CHECK(noise.spatially_homogeneous);
    // k^{-2} decay of the weights
    CHECK(noise.weights[1] == doctest::Approx(noise.weights[0] / 4.0).epsilon(1e-12));
}

TEST_CASE("diffusion spec consistency: A = sigma^2 and B' = A") {
    const DiffusionSpec diff = make_diffusion("degenerate-power", 0.8, 0.6);
    for (double xi : xi_grid(-2.0, 2.0, 41))
        CHECK(diff.a_of(xi) == doctest::Approx(diff.sigma(xi) * diff.sigma(xi)).epsilon(1e-12));
    // derivative of the tabulated B matches A by central differences; the
    // step spans several table cells of the piecewise-linear interpolant
    const double d = 1e-2;
    for (double xi : {-1.3, -0.4, 0.2, 0.9, 1.7}) {
        const double slope = (diff.big_b(xi + d) - diff.big_b(xi - d)) / (2.0 * d);
        CHECK(slope == doctest::Approx(diff.a_of(xi)).epsilon(0.01));
    }
    CHECK(diff.big_b(0.0) == 0.0);
    CHECK(diff.a_sup() == doctest::Approx(0.64).epsilon(1e-9));
}

TEST_CASE("tabulated antiderivative reproduces sin from cos") {
    const TabulatedAntiderivative anti([](double s) { return std::cos(s); }, std::numbers::pi,
                                       8192);
    // linear interpolation between table nodes: error O(step^2) ~ 6e-7
    for (double x : {-2.5, -1.0, 0.0, 0.4, 3.0})
        CHECK(anti(x) == doctest::Approx(std::sin(x)).epsilon(1e-5));
    // linear extension outside the table radius
    const double edge = std::numbers::pi;
    const double outside = anti(edge + 1.0);
    CHECK(outside == doctest::Approx(std::sin(edge) + std::cos(edge) * 1.0).epsilon(1e-6));
}

TEST_CASE("flux lipschitz_on samples the derivative range") {
    const FluxSpec flux = make_flux("burgers");
    CHECK(flux.lipschitz_on(2.0) == doctest::Approx(2.0).epsilon(0.01));
    const FluxSpec lin = make_flux("linear", 1.5);
    CHECK(lin.lipschitz_on(10.0) == doctest::Approx(1.5).epsilon(1e-9));
}
