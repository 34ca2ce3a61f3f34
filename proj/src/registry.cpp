#include "fraclaws/registry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace fraclaws {

FluxSpec make_flux(const std::string& name, double param) {
    FluxSpec f;
    f.name = name;
    if (name == "zero") {
        f.eval = [](double) { return 0.0; };
        f.deriv = [](double) { return 0.0; };
        f.growth_exponent = 1.0;
        f.growth_constant = 1.0;
        f.lipschitz = 0.0;
    } else if (name == "linear") {
        f.eval = [param](double xi) { return param * xi; };
        f.deriv = [param](double) { return param; };
        f.growth_exponent = 1.0;
        f.growth_constant = std::abs(param);
        f.lipschitz = std::abs(param);
    } else if (name == "burgers") {
        f.eval = [param](double xi) { return param * 0.5 * xi * xi; };
        f.deriv = [param](double xi) { return param * xi; };
        f.growth_exponent = 2.0;
        f.growth_constant = std::max(1.0, std::abs(param));
    } else {
        throw std::invalid_argument("unknown flux: " + name);
    }
    return f;
}

DiffusionSpec make_diffusion(const std::string& name, double param, double gamma) {
    DiffusionSpec d;
    d.name = name;
    std::function<double(double)> sigma;
    if (name == "zero") {
        sigma = [](double) { return 0.0; };
        d.sigma_sup = 0.0;
        d.holder_exponent = 1.0;
    } else if (name == "constant") {
        sigma = [param](double) { return param; };
        d.sigma_sup = std::abs(param);
        d.holder_exponent = 1.0;
    } else if (name == "degenerate-power") {
        sigma = [param, gamma](double xi) {
            return param * std::min(std::pow(std::abs(xi), gamma), 1.0);
        };
        d.sigma_sup = std::abs(param);
        d.holder_exponent = gamma;
        d.holder_constant = std::abs(param);
    } else if (name == "degenerate-band") {
        // discontinuous root; violates the Holder hypothesis on purpose
        sigma = [param](double xi) { return std::abs(xi) > 0.5 ? param : 0.0; };
        d.sigma_sup = std::abs(param);
        d.holder_exponent = gamma;
    } else {
        throw std::invalid_argument("unknown diffusion: " + name);
    }
    d.sigma = sigma;
    d.a_of = [sigma](double xi) {
        const double s = sigma(xi);
        return s * s;
    };
    auto table = std::make_shared<TabulatedAntiderivative>(d.a_of, 16.0, std::size_t{1} << 15);
    d.big_b = [table](double xi) { return (*table)(xi); };
    return d;
}

NoiseSpec make_noise(const std::string& name, double amp, std::size_t truncation) {
    NoiseSpec n;
    n.name = name;
    n.modulus = [](double z) { return std::min(z, 1.0); };
    if (name == "none") {
        n.weights.clear();
        n.base = [](double, double) { return 0.0; };
        n.d0 = 1.0;
        n.d1 = 1.0;
        n.spatially_homogeneous = true;
        return n;
    }
    // weights ~ k^{-2}, normalized so sum w_k^2 = 1
    n.weights.resize(truncation);
    double norm = 0.0;
    for (std::size_t k = 0; k < truncation; ++k) {
        n.weights[k] = 1.0 / static_cast<double>((k + 1) * (k + 1));
        norm += n.weights[k] * n.weights[k];
    }
    norm = std::sqrt(norm);
    for (auto& w : n.weights) w /= norm;

    if (name == "multiplicative") {
        n.base = [amp](double, double u) { return amp * u; };
        n.d0 = std::max(amp * amp, 1e-30);
        n.d1 = std::max(amp * amp, 1e-30);
    } else if (name == "additive") {
        n.base = [amp](double, double) { return amp; };
        n.d0 = std::max(amp * amp, 1e-30);
        n.d1 = 1e-30;
    } else if (name == "bounded-multiplicative") {
        n.base = [amp](double, double u) { return amp * u / (1.0 + u * u); };
        n.d0 = std::max(amp * amp, 1e-30);
        n.d1 = std::max(amp * amp, 1e-30);
    } else {
        throw std::invalid_argument("unknown noise: " + name);
    }
    n.spatially_homogeneous = true;
    return n;
}

TabulatedCoefficients load_coefficients_csv(const std::string& path, double gamma) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto xi = std::make_shared<std::vector<double>>();
    auto fv = std::make_shared<std::vector<double>>();
    auto sv = std::make_shared<std::vector<double>>();
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
            continue;
        try {
            const double x = std::stod(a);
            const double f = std::stod(b);
            const double s = std::stod(c);
            xi->push_back(x);
            fv->push_back(f);
            sv->push_back(s);
        } catch (const std::exception&) {
            continue;  // header or comment row
        }
    }
    if (xi->size() < 2) throw std::runtime_error("coefficient CSV needs at least 2 numeric rows");
    for (std::size_t i = 1; i < xi->size(); ++i)
        if ((*xi)[i] <= (*xi)[i - 1])
            throw std::runtime_error("coefficient CSV: xi column must be strictly increasing");

    auto interp = [xi](const std::shared_ptr<std::vector<double>>& ys, double x,
                       bool extend_linear) -> double {
        const auto& g = *xi;
        const auto& y = *ys;
        if (x <= g.front()) {
            if (!extend_linear) return y.front();
            const double s = (y[1] - y[0]) / (g[1] - g[0]);
            return y.front() + s * (x - g.front());
        }
        if (x >= g.back()) {
            if (!extend_linear) return y.back();
            const std::size_t n = g.size();
            const double s = (y[n - 1] - y[n - 2]) / (g[n - 1] - g[n - 2]);
            return y.back() + s * (x - g.back());
        }
        const auto it = std::upper_bound(g.begin(), g.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
        const double t = (x - g[i]) / (g[i + 1] - g[i]);
        return y[i] * (1.0 - t) + y[i + 1] * t;
    };

    TabulatedCoefficients out;
    out.flux.name = "csv:" + path;
    out.flux.eval = [interp, fv](double x) { return interp(fv, x, true); };
    out.flux.deriv = [interp, fv, xi](double x) {
        const double h = ((*xi).back() - (*xi).front()) / static_cast<double>(xi->size() * 4);
        return (interp(fv, x + h, true) - interp(fv, x - h, true)) / (2.0 * h);
    };
    out.flux.growth_exponent = 2.0;
    double lip = 0.0;
    for (std::size_t i = 1; i < xi->size(); ++i)
        lip = std::max(lip, std::abs(((*fv)[i] - (*fv)[i - 1]) / ((*xi)[i] - (*xi)[i - 1])));
    out.flux.growth_constant = std::max(1.0, lip);

    out.diffusion.name = "csv:" + path;
    out.diffusion.sigma = [interp, sv](double x) { return std::max(0.0, interp(sv, x, false)); };
    auto sigma = out.diffusion.sigma;
    out.diffusion.a_of = [sigma](double x) {
        const double s = sigma(x);
        return s * s;
    };
    auto table = std::make_shared<TabulatedAntiderivative>(out.diffusion.a_of, 16.0,
                                                           std::size_t{1} << 15);
    out.diffusion.big_b = [table](double x) { return (*table)(x); };
    double ssup = 0.0;
    for (double s : *sv) ssup = std::max(ssup, std::abs(s));
    out.diffusion.sigma_sup = ssup;
    out.diffusion.holder_exponent = gamma;
    return out;
}

}  // namespace fraclaws
