#include "fraclaws/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace fraclaws {

namespace {

constexpr double kPassSlack = 1e-9;

/// Unit-mass bump exp(-1/(1-s^2)) on (-1,1); mass computed once.
double bump_raw(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

double bump_mass() {
    static const double mass = [] {
        // composite Simpson on [-1,1], smooth integrand
        const int n = 4096;
        const double h = 2.0 / n;
        double acc = bump_raw(-1.0) + bump_raw(1.0);
        for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * bump_raw(-1.0 + i * h);
        return acc * h / 3.0;
    }();
    return mass;
}

/// Smoothstep transition: 1 at t<=0, 0 at t>=1, C^1 in between.
double smoothstep_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

/// Truncation S_tau: 1 on [-1/tau, 1/tau], 0 outside [-1/tau-1, 1/tau+1].
double truncation(double xi, double tau) {
    return smoothstep_down(std::abs(xi) - 1.0 / tau);
}

// 16-point Gauss-Legendre nodes/weights on [-1,1]
constexpr int kGaussN = 16;
constexpr double kGaussX[kGaussN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGaussW[kGaussN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

/// (F * kappa_tau)(xi) by Gauss-Legendre on the mollifier support (-tau, tau).
double mollify(const std::function<double(double)>& f, double xi, double tau) {
    const double mass = bump_mass();
    double acc = 0.0;
    for (int i = 0; i < kGaussN; ++i) {
        const double s = tau * kGaussX[i];
        acc += kGaussW[i] * f(xi - s) * bump_raw(s / tau) / mass;
    }
    return acc;  // the tau scaling of kappa_tau cancels against the interval map
}

}  // namespace

double FluxSpec::lipschitz_on(double radius) const {
    double mx = 0.0;
    const int n = 2048;
    for (int i = 0; i <= n; ++i) {
        const double xi = -radius + 2.0 * radius * i / n;
        mx = std::max(mx, std::abs(deriv(xi)));
    }
    if (lipschitz) mx = std::min(mx, *lipschitz);
    return mx;
}

double NoiseSpec::beta_sq(double x, double u) const {
    const double b = base(x, u);
    return weight_sq_sum() * b * b;
}

double NoiseSpec::weight_sq_sum() const {
    double acc = 0.0;
    for (double w : weights) acc += w * w;
    return acc;
}

FluxSpec regularize_flux(const FluxSpec& spec, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("regularize_flux: tau must be > 0");

    const double support = 1.0 / tau + 1.0;
    const double step = tau / 8.0;
    const double lo = -support - step;  // one guard cell of exact zeros
    const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * (support + step) / step)) + 1;

    auto table = std::make_shared<std::vector<double>>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = lo + step * static_cast<double>(i);
        const double s = truncation(xi, tau);
        (*table)[i] = s == 0.0 ? 0.0 : mollify(spec.eval, xi, tau) * s;
    }

    auto eval = [table, lo, step, support](double xi) -> double {
        if (std::abs(xi) >= support) return 0.0;
        const double t = (xi - lo) / step;
        const std::size_t i = std::min(static_cast<std::size_t>(t), table->size() - 2);
        const double frac = t - static_cast<double>(i);
        return (*table)[i] * (1.0 - frac) + (*table)[i + 1] * frac;
    };
    auto deriv = [table, lo, step, support](double xi) -> double {
        if (std::abs(xi) >= support) return 0.0;
        const double t = (xi - lo) / step;
        const std::size_t i = std::min(static_cast<std::size_t>(t), table->size() - 2);
        return ((*table)[i + 1] - (*table)[i]) / step;
    };

    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        lip = std::max(lip, std::abs((*table)[i + 1] - (*table)[i]) / step);

    FluxSpec out;
    out.name = spec.name + "^tau";
    out.eval = eval;
    out.deriv = deriv;
    out.growth_exponent = spec.growth_exponent;
    out.growth_constant = spec.growth_constant;
    out.holder_exponent_f1 = spec.holder_exponent_f1;
    out.lipschitz = lip;
    return out;
}

bool HypothesisReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

HypothesisReport check_hypotheses(const FluxSpec& flux, const DiffusionSpec& diff,
                                  const NoiseSpec& noise, const std::vector<double>& xi_grid) {
    if (xi_grid.empty()) throw std::invalid_argument("check_hypotheses: empty xi grid");
    HypothesisReport report;
    auto add = [&report](const std::string& name, double ratio) {
        report.entries.push_back({name, ratio, ratio <= 1.0 + kPassSlack});
    };

    // (F.1): |F'(xi)| <= C (1 + |xi|^{q*-1})
    {
        double worst = 0.0;
        for (double xi : xi_grid) {
            const double bound =
                flux.growth_constant * (1.0 + std::pow(std::abs(xi), flux.growth_exponent - 1.0));
            worst = std::max(worst, std::abs(flux.deriv(xi)) / bound);
        }
        add("flux_growth_F1", worst);
    }

    // (holder): |sigma(xi)-sigma(zeta)| <= C |xi-zeta|^gamma on pairs |xi-zeta|<1
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < xi_grid.size(); ++i) {
            for (std::size_t j = i + 1; j < xi_grid.size(); ++j) {
                const double d = std::abs(xi_grid[i] - xi_grid[j]);
                if (d <= 0.0 || d >= 1.0) continue;
                const double num = std::abs(diff.sigma(xi_grid[i]) - diff.sigma(xi_grid[j]));
                worst = std::max(worst,
                                 num / (diff.holder_constant * std::pow(d, diff.holder_exponent)));
            }
        }
        add("sigma_holder", worst);
    }

    // A = sigma^2 >= 0
    {
        double worst = 0.0;
        for (double xi : xi_grid) {
            const double a = diff.a_of(xi);
            const double s = diff.sigma(xi);
            worst = std::max(worst, std::abs(a - s * s) / (1.0 + std::abs(a)));
            if (a < 0.0) worst = std::max(worst, 2.0);
        }
        add("diffusion_nonnegative_square", worst);
    }

    const double xs[] = {0.0, 1.0, 2.5, 4.0};

    // (2.2): sum beta_k^2 <= d0 (1 + u^2)
    {
        double worst = 0.0;
        for (double x : xs)
            for (double u : xi_grid)
                worst = std::max(worst, noise.beta_sq(x, u) / (noise.d0 * (1.0 + u * u)));
        add("noise_growth_2_2", worst);
    }

    // (2.3): sum |beta_k(x,u)-beta_k(y,v)|^2 <= d1 (|x-y|^2 + |u-v| h(|u-v|))
    {
        double worst = 0.0;
        for (double x : xs) {
            for (double y : xs) {
                for (double u : xi_grid) {
                    for (double v : xi_grid) {
                        const double dx = x - y;
                        const double du = std::abs(u - v);
                        if (dx == 0.0 && du == 0.0) continue;
                        double num = 0.0;
                        for (std::size_t k = 0; k < noise.truncation(); ++k) {
                            const double d = noise.beta(k, x, u) - noise.beta(k, y, v);
                            num += d * d;
                        }
                        const double bound = noise.d1 * (dx * dx + du * noise.modulus(du));
                        if (bound == 0.0) {
                            if (num > 0.0) worst = std::max(worst, 2.0);
                            continue;
                        }
                        worst = std::max(worst, num / bound);
                    }
                }
            }
        }
        add("noise_continuity_2_3", worst);
    }

    return report;
}

double flux_modulus(const FluxSpec& spec, double delta, const std::vector<double>& xi_grid) {
    if (!(delta > 0.0)) throw std::invalid_argument("flux_modulus: delta must be > 0");
    const int nz = 33;
    double worst = 0.0;
    for (double xi : xi_grid) {
        const double denom = 1.0 + std::pow(std::abs(xi), spec.growth_exponent - 1.0);
        for (int j = 0; j < nz; ++j) {
            const double zeta = -delta + 2.0 * delta * j / (nz - 1);
            worst = std::max(worst, std::abs(spec.deriv(xi) - spec.deriv(xi + zeta)) / denom);
        }
    }
    return worst;
}

TabulatedAntiderivative::TabulatedAntiderivative(const std::function<double(double)>& integrand,
                                                double radius, std::size_t num_cells) {
    if (num_cells % 2) ++num_cells;  // Simpson pairs
    lo_ = -radius;
    step_ = 2.0 * radius / static_cast<double>(num_cells);
    table_.resize(num_cells + 1);
    slope_.resize(num_cells + 1);
    for (std::size_t i = 0; i <= num_cells; ++i) slope_[i] = integrand(lo_ + step_ * i);
    // cumulative Simpson over cell pairs, then shift so the value at xi=0 is 0
    table_[0] = 0.0;
    for (std::size_t i = 0; i + 2 <= num_cells; i += 2) {
        const double pair = step_ / 3.0 * (slope_[i] + 4.0 * slope_[i + 1] + slope_[i + 2]);
        // midpoint value via half-cell Simpson
        const double mid = step_ / 6.0 *
                           (slope_[i] + 4.0 * integrand(lo_ + step_ * (i + 0.5)) + slope_[i + 1]);
        table_[i + 1] = table_[i] + mid;
        table_[i + 2] = table_[i] + pair;
    }
    const std::size_t zero_idx = num_cells / 2;  // xi = 0
    const double at_zero = table_[zero_idx];
    for (auto& v : table_) v -= at_zero;
}

double TabulatedAntiderivative::operator()(double xi) const {
    if (table_.empty()) return 0.0;
    const double hi = lo_ + step_ * static_cast<double>(table_.size() - 1);
    if (xi <= lo_) return table_.front() + slope_.front() * (xi - lo_);
    if (xi >= hi) return table_.back() + slope_.back() * (xi - hi);
    const double t = (xi - lo_) / step_;
    const std::size_t i = std::min(static_cast<std::size_t>(t), table_.size() - 2);
    const double frac = t - static_cast<double>(i);
    return table_[i] * (1.0 - frac) + table_[i + 1] * frac;
}

}  // namespace fraclaws
