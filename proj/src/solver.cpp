#include "fraclaws/solver.hpp"

#include "fraclaws/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fraclaws {

BlowUpError::BlowUpError(std::uint64_t s, double t)
    : std::runtime_error("solution blew up at step " + std::to_string(s) + ", t = " +
                         std::to_string(t)),
      step(s),
      time(t) {}

double SolverConfig::cfl_bound() const {
    const double h = grid.spacing();
    double bound = std::numeric_limits<double>::infinity();
    if (flux_lipschitz > 0.0) bound = std::min(bound, h / flux_lipschitz);
    const double diff = diffusion.a_sup() + 2.0 * viscosity;
    if (diff > 0.0) bound = std::min(bound, h * h / (2.0 * diff));
    return cfl_safety * bound;
}

void SolverConfig::validate() const {
    if (grid.m < 8) throw std::invalid_argument("SolverConfig: grid not initialized");
    if (fractional_on && !(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("SolverConfig: lambda must be in (0,1)");
    if (!(viscosity >= 0.0)) throw std::invalid_argument("SolverConfig: tau must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (!(t_end >= 0.0)) throw std::invalid_argument("SolverConfig: t_end must be >= 0");
    if (dt > cfl_bound() * (1.0 + 1e-12))
        throw std::invalid_argument("SolverConfig: dt violates the CFL bound " +
                                    std::to_string(cfl_bound()));
    if (noise.truncation() > 0 && !noise.base)
        throw std::invalid_argument("SolverConfig: noise base missing");
}

namespace {

// 16-point Gauss-Legendre on [-1,1] for the Engquist-Osher splittings
constexpr int kGN = 16;
constexpr double kGX[kGN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGW[kGN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double eo_plus(const FluxSpec& flux, double u) {
    double acc = 0.0;
    for (int g = 0; g < kGN; ++g)
        acc += kGW[g] * std::max(flux.deriv(0.5 * u * (kGX[g] + 1.0)), 0.0);
    return flux.eval(0.0) + 0.5 * u * acc;
}

double eo_minus(const FluxSpec& flux, double u) {
    double acc = 0.0;
    for (int g = 0; g < kGN; ++g)
        acc += kGW[g] * std::min(flux.deriv(0.5 * u * (kGX[g] + 1.0)), 0.0);
    return 0.5 * u * acc;
}

std::vector<double> implicit_multipliers(const SolverConfig& cfg, double dt_step) {
    const std::size_t m = cfg.grid.m;
    std::vector<double> mult(m);
    for (std::size_t j = 0; j < m; ++j) {
        const long jj = static_cast<long>(j);
        const long n = jj <= static_cast<long>(m) / 2 ? jj : jj - static_cast<long>(m);
        const double psi = cfg.fractional_on ? spectral_symbol(cfg.lambda, std::labs(n)) : 0.0;
        const double n2 = static_cast<double>(n) * static_cast<double>(n);
        mult[j] = 1.0 / (1.0 + dt_step * (psi + cfg.viscosity * n2));
    }
    return mult;
}

Field step_impl(const Field& u, const SolverConfig& cfg, double dt_step, double noise_sum,
                const std::vector<double>& mult) {
    const std::size_t m = u.size();
    const double h = cfg.grid.spacing();
    const auto& v = u.values;

    // explicit conservative flux + degenerate diffusion + noise
    Field star(u.grid);
    std::vector<double> num_flux(m);  // H_{i+1/2}
    for (std::size_t i = 0; i < m; ++i) {
        const double ul = v[i];
        const double ur = v[(i + 1) % m];
        if (cfg.scheme == FluxScheme::lax_friedrichs) {
            const double alpha = std::max(std::abs(cfg.flux.deriv(ul)), std::abs(cfg.flux.deriv(ur)));
            num_flux[i] = 0.5 * (cfg.flux.eval(ul) + cfg.flux.eval(ur)) - 0.5 * alpha * (ur - ul);
        } else {
            num_flux[i] = eo_plus(cfg.flux, ul) + eo_minus(cfg.flux, ur);
        }
    }
    std::vector<double> big_b(m);
    for (std::size_t i = 0; i < m; ++i) big_b[i] = cfg.diffusion.big_b ? cfg.diffusion.big_b(v[i]) : 0.0;

    const bool noisy = cfg.noise.truncation() > 0 && noise_sum != 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t im = (i + m - 1) % m;
        const std::size_t ip = (i + 1) % m;
        double val = v[i] - dt_step / h * (num_flux[i] - num_flux[im]) +
                     dt_step / (h * h) * (big_b[ip] - 2.0 * big_b[i] + big_b[im]);
        if (noisy) val += cfg.noise.base(cfg.grid.x(i), v[i]) * noise_sum;
        star.values[i] = val;
    }

    // implicit spectral solve for the fractional + viscous terms
    SpectralField s = dft(star);
    for (std::size_t j = 0; j < m; ++j) s.coefficients[j] *= mult[j];
    return idft(s);
}

double aggregated_noise(const SolverConfig& cfg, const SamplePath& path, std::uint64_t m,
                        double dt_step) {
    const std::size_t k_count = cfg.noise.truncation();
    if (k_count == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < k_count; ++k)
        acc += cfg.noise.weights[k] * path.increment(static_cast<std::uint32_t>(k), m, dt_step);
    return acc;
}

StepDiagnostics make_diagnostics(const Field& u, const SolverConfig& cfg, double t, double p) {
    StepDiagnostics d;
    d.t = t;
    d.mass = mean(u);
    d.l1 = lp_norm(u, 1.0);
    d.l2 = lp_norm(u, 2.0);
    d.lp = lp_norm(u, p);
    d.tv = total_variation(u);
    const std::size_t m = u.size();
    const double h = cfg.grid.spacing();
    double grad2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double g = (u.values[(i + 1) % m] - u.values[(i + m - 1) % m]) / (2.0 * h);
        grad2 += h * g * g;
    }
    d.viscous_dissipation = cfg.viscosity * grad2;
    return d;
}

}  // namespace

Field step(const Field& u, const SolverConfig& cfg, const SamplePath& path, std::uint64_t m,
           double dt_step) {
    if (!u.all_finite()) throw std::invalid_argument("step: non-finite input state");
    const auto mult = implicit_multipliers(cfg, dt_step);
    const double s = aggregated_noise(cfg, path, m, dt_step);
    Field out = step_impl(u, cfg, dt_step, s, mult);
    if (!out.all_finite()) throw BlowUpError(m, static_cast<double>(m) * cfg.dt);
    return out;
}

Trajectory simulate_path(const SolverConfig& cfg, const Field& u0, const SamplePath& path,
                         const std::vector<double>& snapshot_times, const SimulateOptions& opts) {
    cfg.validate();
    if (u0.grid != cfg.grid) throw std::invalid_argument("simulate_path: grid mismatch");
    if (cfg.noise.truncation() > path.truncation && cfg.noise.truncation() > 0)
        throw std::invalid_argument("simulate_path: path truncation below noise truncation");

    std::vector<double> snaps = snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    for (double t : snaps)
        if (t < 0.0 || t > cfg.t_end * (1.0 + 1e-12))
            throw std::invalid_argument("simulate_path: snapshot time outside [0, t_end]");
    if (snaps.empty() || snaps.front() > 0.0) snaps.insert(snaps.begin(), 0.0);
    if (snaps.back() < cfg.t_end) snaps.push_back(cfg.t_end);

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(u0);

    const auto mult_full = implicit_multipliers(cfg, cfg.dt);

    Field u = u0;
    double t = 0.0;
    std::uint64_t m = 0;
    std::size_t snap_idx = 1;  // snaps[0] == 0 already recorded
    while (snap_idx < snaps.size()) {
        const double target = snaps[snap_idx];
        while (t < target * (1.0 - 1e-15) && target - t > 1e-15 * std::max(1.0, target)) {
            double dt_step = cfg.dt;
            bool landing = false;
            if (target - t <= cfg.dt * (1.0 + 1e-9)) {
                dt_step = target - t;
                landing = true;
            }
            const double s = aggregated_noise(cfg, path, m, dt_step);
            if (opts.record_full) {
                traj.full_states.push_back(u);
                traj.steps.push_back({t, dt_step, s});
            }
            const auto& mult =
                landing && dt_step != cfg.dt ? implicit_multipliers(cfg, dt_step) : mult_full;
            u = step_impl(u, cfg, dt_step, s, mult);
            if (!u.all_finite()) throw BlowUpError(m, t + dt_step);
            t = landing ? target : t + dt_step;
            ++m;
            if (opts.record_diagnostics)
                traj.diagnostics.push_back(make_diagnostics(u, cfg, t, opts.diagnostics_p));
        }
        traj.times.push_back(target);
        traj.states.push_back(u);
        ++snap_idx;
    }
    if (opts.record_full) traj.full_states.push_back(u);
    return traj;
}

CoupledResult coupled_simulate(const SolverConfig& cfg_a, const SolverConfig& cfg_b,
                               const Field& u0a, const Field& u0b, const SamplePath& path,
                               const std::vector<double>& snapshot_times) {
    if (cfg_a.grid != cfg_b.grid) throw std::invalid_argument("coupled_simulate: grid mismatch");
    if (cfg_a.dt != cfg_b.dt) throw std::invalid_argument("coupled_simulate: dt mismatch");
    if (cfg_a.t_end != cfg_b.t_end)
        throw std::invalid_argument("coupled_simulate: t_end mismatch");
    if (path.truncation < std::max(cfg_a.noise.truncation(), cfg_b.noise.truncation()))
        throw std::invalid_argument("coupled_simulate: path truncation too small");

    CoupledResult out;
    out.a = simulate_path(cfg_a, u0a, path, snapshot_times);
    out.b = simulate_path(cfg_b, u0b, path, snapshot_times);
    out.distances.resize(out.a.times.size());
    for (std::size_t j = 0; j < out.distances.size(); ++j)
        out.distances[j] = lp_norm(out.a.states[j] - out.b.states[j], 1.0);
    return out;
}

std::vector<CauchyEntry> viscosity_sweep(const SolverConfig& cfg_template,
                                         const std::vector<double>& tau_list, const Field& u0,
                                         int num_mc, const ViscositySweepOptions& opts) {
    for (std::size_t i = 1; i < tau_list.size(); ++i)
        if (tau_list[i] > tau_list[i - 1])
            throw std::invalid_argument("viscosity_sweep: tau list must be decreasing");
    for (std::size_t i = 0; i + 1 < tau_list.size(); ++i)
        if (!(tau_list[i] > 0.0))
            throw std::invalid_argument("viscosity_sweep: only the final tau may be 0");

    std::vector<CauchyEntry> table;
    if (tau_list.size() < 2) return table;

    auto config_for = [&](double tau) {
        SolverConfig c = cfg_template;
        c.viscosity = tau;
        if (opts.link_flux_regularization && tau > 0.0) {
            c.flux = regularize_flux(cfg_template.flux, tau);
            c.flux_lipschitz = std::min(*c.flux.lipschitz,
                                        cfg_template.flux.lipschitz_on(opts.state_bound));
        }
        return c;
    };

    // common dt satisfying every tau's CFL bound so paths stay aligned
    double dt = std::numeric_limits<double>::infinity();
    for (double tau : tau_list) dt = std::min(dt, config_for(tau).cfl_bound());
    dt *= 0.95;

    for (std::size_t p = 0; p + 1 < tau_list.size(); ++p) {
        SolverConfig ca = config_for(tau_list[p]);
        SolverConfig cb = config_for(tau_list[p + 1]);
        ca.dt = cb.dt = dt;
        CauchyEntry entry{tau_list[p], tau_list[p + 1], 0.0, 0.0};
        if (tau_list[p] == tau_list[p + 1]) {
            table.push_back(entry);
            continue;
        }
        std::vector<double> dist(static_cast<std::size_t>(num_mc));
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < num_mc; ++r) {
            SamplePath path{cfg_template.seed, static_cast<std::uint32_t>(r),
                            static_cast<std::uint32_t>(cfg_template.noise.truncation()), 0};
            const auto res = coupled_simulate(ca, cb, u0, u0, path, {cfg_template.t_end});
            dist[static_cast<std::size_t>(r)] = res.distances.back();
        }
        double mean_d = 0.0;
        for (double d : dist) mean_d += d;
        mean_d /= static_cast<double>(num_mc);
        double var = 0.0;
        for (double d : dist) var += (d - mean_d) * (d - mean_d);
        var /= std::max(1, num_mc - 1);
        entry.mean_distance = mean_d;
        entry.std_error = std::sqrt(var / static_cast<double>(num_mc));
        table.push_back(entry);
    }
    return table;
}

}  // namespace fraclaws
