#include "doctest.h"

#include "fraclaws/fractional.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fraclaws;

namespace {

constexpr double kPi = std::numbers::pi;

Field sample(const TorusGrid& grid, double (*fn)(double)) {
    Field f(grid);
    for (std::size_t i = 0; i < grid.m; ++i) f.values[i] = fn(grid.x(i));
    return f;
}

Field random_field(const TorusGrid& grid, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(grid);
    for (double& v : f.values) v = dist(gen);
    return f;
}

double rel_l2_error(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
        den += b.values[i] * b.values[i];
    }
    return std::sqrt(num / den);
}

// independent oracle for the symbol constant via the Gamma-function identity
double gamma_oracle(double lambda) {
    return -2.0 * std::tgamma(-2.0 * lambda) * std::cos(kPi * lambda);
}

}  // namespace

TEST_CASE("symbol constant matches the Gamma-function closed form") {
    for (double lam : {0.1, 0.25, 0.4, 0.6, 0.75, 0.9})
        CHECK(symbol_constant(lam) == doctest::Approx(gamma_oracle(lam)).epsilon(1e-8));
    CHECK(symbol_constant(0.5) == doctest::Approx(kPi).epsilon(1e-10));
}

TEST_CASE("spectral symbol scales as |n|^{2 lambda} and vanishes at n = 0") {
    for (double lam : {0.25, 0.5, 0.75}) {
        CHECK(spectral_symbol(lam, 0) == 0.0);
        for (long n : {1L, 2L, 4L}) {
            const double ratio = spectral_symbol(lam, 2 * n) / spectral_symbol(lam, n);
            CHECK(ratio == doctest::Approx(std::pow(2.0, 2.0 * lam)).epsilon(1e-8));
            CHECK(spectral_symbol(lam, -n) == spectral_symbol(lam, n));
        }
    }
}

TEST_CASE("spectral operator acts on cos x as multiplication by psi(1)") {
    const TorusGrid grid(64);
    const Field out = apply_spectral(sample(grid, [](double x) { return std::cos(x); }), 0.5);
    // psi_{1/2}(1) = pi
    for (std::size_t i = 0; i < grid.m; ++i)
        CHECK(out.values[i] == doctest::Approx(kPi * std::cos(grid.x(i))).epsilon(1e-8));

    const Field out2 =
        apply_spectral(sample(grid, [](double x) { return std::cos(2.0 * x); }), 0.3);
    const double factor = symbol_constant(0.3) * std::pow(2.0, 0.6);
    for (std::size_t i = 0; i < grid.m; ++i)
        CHECK(out2.values[i] == doctest::Approx(factor * std::cos(2.0 * grid.x(i))).epsilon(1e-8));
}

TEST_CASE("quadrature annihilates constants") {
    const TorusGrid grid(64);
    const QuadratureResult res = apply_quadrature_full(Field(grid, 3.7), 0.5, grid.spacing());
    for (double v : res.value.values) CHECK(std::abs(v) < 1e-10);
    CHECK(res.tail_error_bound == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quadrature agrees with the analytic action on cos x") {
    const TorusGrid grid(256);
    const Field f = sample(grid, [](double x) { return std::cos(x); });
    const Field out = apply_quadrature(f, 0.5, grid.spacing());
    Field exact(grid);
    for (std::size_t i = 0; i < grid.m; ++i) exact.values[i] = kPi * std::cos(grid.x(i));
    CHECK(rel_l2_error(out, exact) < 1e-3);
}

TEST_CASE("quadrature matches the spectral realization on band-limited data") {
    const TorusGrid grid(256);
    Field f(grid);
    for (std::size_t i = 0; i < grid.m; ++i) {
        const double x = grid.x(i);
        f.values[i] = std::sin(x) + 0.4 * std::cos(3.0 * x) - 0.2 * std::sin(8.0 * x);
    }
    const Field spec = apply_spectral(f, 0.75);
    const Field quad = apply_quadrature(f, 0.75, grid.spacing());
    CHECK(rel_l2_error(quad, spec) < 1e-3);
}

TEST_CASE("serial and parallel quadrature paths agree") {
    const TorusGrid grid(128);
    const Field f = random_field(grid, 5);
    const Field par = apply_quadrature(f, 0.6, grid.spacing());
    const Field ser = apply_quadrature_serial(f, 0.6, grid.spacing());
    for (std::size_t i = 0; i < grid.m; ++i)
        CHECK(par.values[i] == doctest::Approx(ser.values[i]).epsilon(1e-11));
}

TEST_CASE("spectral operator is self-adjoint and positive semidefinite") {
    const TorusGrid grid(64);
    const double h = grid.spacing();
    const Field f = random_field(grid, 8);
    const Field g = random_field(grid, 9);
    const Field gf = apply_spectral(f, 0.4);
    const Field gg = apply_spectral(g, 0.4);
    double fg = 0.0, gf_ = 0.0, ff = 0.0;
    for (std::size_t i = 0; i < grid.m; ++i) {
        fg += f.values[i] * gg.values[i];
        gf_ += gf.values[i] * g.values[i];
        ff += f.values[i] * gf.values[i];
    }
    CHECK(h * fg == doctest::Approx(h * gf_).epsilon(1e-10));
    CHECK(h * ff >= -1e-12);
}

TEST_CASE("operator annihilates the mean of its output") {
    const TorusGrid grid(64);
    const Field out = apply_spectral(random_field(grid, 10), 0.55);
    CHECK(std::abs(mean(out)) < 1e-12);
    const Field qout = apply_quadrature(random_field(grid, 10), 0.55, grid.spacing());
    CHECK(std::abs(mean(qout)) < 1e-8);
}

TEST_CASE("kernel difference second moment: basic structure") {
    CHECK(kernel_difference_second_moment(0.4, 0.4, 1.5) == 0.0);
    CHECK(kernel_difference_second_moment(0.25, 0.5, 1.0) ==
          doctest::Approx(kernel_difference_second_moment(0.5, 0.25, 1.0)).epsilon(1e-12));
    // monotone in r1
    const double a = kernel_difference_second_moment(0.25, 0.5, 0.5);
    const double b = kernel_difference_second_moment(0.25, 0.5, 1.0);
    const double c = kernel_difference_second_moment(0.25, 0.5, 2.0);
    CHECK(a <= b);
    CHECK(b <= c);
    CHECK(a > 0.0);
}

TEST_CASE("kernel difference second moment against a quadrature oracle") {
    // oracle: trapezoid on int_{-r1}^{r1} z^2 |mu_l(z) - mu_b(z)| dz; the
    // integrand z^{1-2 max(l,b)} is integrable, so a fine grid suffices
    const double lam = 0.25, beta = 0.5;
    for (double r1 : {1.0, 2.0}) {
        const std::size_t n = 2000000;
        double acc = 0.0;
        const double dz = r1 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (static_cast<double>(i) + 0.5) * dz;
            const double ml = std::pow(z, -1.0 - 2.0 * lam);
            const double mb = std::pow(z, -1.0 - 2.0 * beta);
            acc += z * z * std::abs(ml - mb) * dz;
        }
        acc *= 2.0;  // even integrand, both signs of z
        CHECK(kernel_difference_second_moment(lam, beta, r1) ==
              doctest::Approx(acc).epsilon(1e-3));
    }
}

TEST_CASE("tail translation term: vanishing cases") {
    const TorusGrid grid(128);
    CHECK(tail_translation_term(Field(grid, 2.0), 0.3, 0.6, 0.5) ==
          doctest::Approx(0.0).epsilon(1e-12));
    const Field f = sample(grid, [](double x) { return std::sin(x); });
    CHECK(tail_translation_term(f, 0.45, 0.45, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("tail translation term for sin against a quadrature oracle") {
    // ||sin(.+z) - sin||_L1 = 8 |sin(z/2)| on the 2 pi torus
    const double lam = 0.3, beta = 0.6, r1 = 0.5;
    const double z_max = 500.0;
    const std::size_t n = 4000000;
    double acc = 0.0;
    const double lo = std::log(r1), hi = std::log(z_max);
    for (std::size_t i = 0; i < n; ++i) {
        const double t0 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const double t1 = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(n);
        const double z = 0.5 * (std::exp(t0) + std::exp(t1));
        const double dz = std::exp(t1) - std::exp(t0);
        const double dmu = std::abs(std::pow(z, -1.0 - 2.0 * lam) - std::pow(z, -1.0 - 2.0 * beta));
        acc += 8.0 * std::abs(std::sin(0.5 * z)) * dmu * dz;
    }
    acc *= 2.0;  // both signs of z
    // closed-form |z| > z_max remainder: average translation modulus of sin
    // (16/pi) times the tail mass of |mu_lam - mu_beta|
    const double tail_mass = 2.0 * (std::pow(z_max, -2.0 * lam) / (2.0 * lam) -
                                    std::pow(z_max, -2.0 * beta) / (2.0 * beta));
    acc += (16.0 / kPi) * tail_mass;
    const TorusGrid grid(256);
    const Field f = sample(grid, [](double x) { return std::sin(x); });
    CHECK(tail_translation_term(f, lam, beta, r1) == doctest::Approx(acc).epsilon(0.02));
}

TEST_CASE("quadrature cutoff must lie in (0, pi)") {
    const TorusGrid grid(32);
    const Field f = random_field(grid, 1);
    CHECK_THROWS_AS(apply_quadrature(f, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_quadrature(f, 0.5, 3.5), std::invalid_argument);
}

TEST_CASE("levy kernel density and node layout") {
    const LevyKernel k(0.5, 0.1);
    CHECK(k.density(2.0) == doctest::Approx(std::pow(2.0, -2.0)).epsilon(1e-12));
    CHECK(k.symbol_constant == doctest::Approx(kPi).epsilon(1e-8));
    const QuadratureNodes nodes = make_quadrature_nodes(0.1, 50.0);
    REQUIRE(!nodes.z.empty());
    CHECK(nodes.inner_count > 0);
    CHECK(nodes.inner_count < nodes.z.size());
    for (std::size_t i = 0; i < nodes.inner_count; ++i) CHECK(nodes.z[i] < 0.1);
    CHECK(nodes.z.back() <= 50.0);
    // widths tile (0, z_max]
    double covered = 0.0;
    for (double w : nodes.w) covered += w;
    CHECK(covered == doctest::Approx(50.0).epsilon(0.01));
}
