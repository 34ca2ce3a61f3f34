#include "fraclaws/experiments.hpp"

#include "fraclaws/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fraclaws {

namespace {

// mirrors the snapshot normalization done by simulate_path
std::vector<double> normalized_snapshots(const SolverConfig& cfg, std::vector<double> times) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.empty() || times.front() > 0.0) times.insert(times.begin(), 0.0);
    if (times.back() < cfg.t_end) times.push_back(cfg.t_end);
    return times;
}

/// Parallel replica loop with deterministic slot storage; exceptions from
/// worker replicas are rethrown on the calling thread.
void replica_loop(int num_mc, const std::function<void(int)>& body) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < num_mc; ++r) {
        try {
            body(r);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

McEstimate column_estimate(const std::vector<double>& slots, int num_mc, std::size_t col,
                           std::size_t stride) {
    std::vector<double> samples(static_cast<std::size_t>(num_mc));
    for (int r = 0; r < num_mc; ++r)
        samples[static_cast<std::size_t>(r)] = slots[static_cast<std::size_t>(r) * stride + col];
    return make_estimate(samples);
}

}  // namespace

McEstimate make_estimate(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("make_estimate: need >= 2 samples");
    McEstimate e;
    e.num_samples = samples.size();
    const auto n = static_cast<double>(samples.size());
    double acc = 0.0;
    for (double s : samples) acc += s;
    e.mean = acc / n;
    double var = 0.0;
    for (double s : samples) var += (s - e.mean) * (s - e.mean);
    var /= (n - 1.0);
    e.std_error = std::sqrt(var / n);
    return e;
}

double RatePrediction::predicted_exponent() const {
    if (!(lambda_g1 > 0.0) || !(lambda_g2 > 0.0) || !(gamma_b > 0.5))
        throw std::invalid_argument("RatePrediction: exponents out of domain");
    return std::min({0.5, 0.5 * lambda_g1, lambda_g2, 0.5 * gamma_b});
}

ContractionResult run_contraction(const SolverConfig& cfg, const Field& u0a, const Field& u0b,
                                  int num_mc, const std::vector<double>& times) {
    if (num_mc < 2) throw std::invalid_argument("run_contraction: num_mc >= 2 required");
    cfg.validate();
    ContractionResult out;
    out.times = normalized_snapshots(cfg, times);
    out.initial_distance = lp_norm(u0a - u0b, 1.0);

    const std::size_t nt = out.times.size();
    std::vector<double> slots(static_cast<std::size_t>(num_mc) * nt);
    replica_loop(num_mc, [&](int r) {
        SamplePath path{cfg.seed, static_cast<std::uint32_t>(r),
                        static_cast<std::uint32_t>(cfg.noise.truncation()), 0};
        const CoupledResult cr = coupled_simulate(cfg, cfg, u0a, u0b, path, out.times);
        for (std::size_t j = 0; j < nt; ++j)
            slots[static_cast<std::size_t>(r) * nt + j] = cr.distances[j];
    });

    out.pass = true;
    for (std::size_t j = 0; j < nt; ++j) {
        out.distance.push_back(column_estimate(slots, num_mc, j, nt));
        const McEstimate& e = out.distance.back();
        const double bound = out.initial_distance * 1.05 + 3.0 * e.std_error;
        if (e.mean > bound && out.pass) {
            out.pass = false;
            std::ostringstream os;
            os << "contraction violated at t=" << out.times[j] << ": mean " << e.mean
               << " > bound " << bound;
            out.failure = os.str();
        }
    }
    return out;
}

BvResult run_bv(const SolverConfig& cfg, const Field& u0, int num_mc,
                const std::vector<double>& times) {
    if (num_mc < 2) throw std::invalid_argument("run_bv: num_mc >= 2 required");
    if (!cfg.noise.spatially_homogeneous)
        throw std::invalid_argument("run_bv: requires spatially homogeneous noise");
    cfg.validate();
    BvResult out;
    out.times = normalized_snapshots(cfg, times);
    out.initial_tv = total_variation(u0);

    const std::size_t nt = out.times.size();
    std::vector<double> slots(static_cast<std::size_t>(num_mc) * nt);
    replica_loop(num_mc, [&](int r) {
        SamplePath path{cfg.seed, static_cast<std::uint32_t>(r),
                        static_cast<std::uint32_t>(cfg.noise.truncation()), 0};
        const Trajectory traj = simulate_path(cfg, u0, path, out.times);
        for (std::size_t j = 0; j < nt; ++j)
            slots[static_cast<std::size_t>(r) * nt + j] = total_variation(traj.states[j]);
    });

    out.pass = true;
    for (std::size_t j = 0; j < nt; ++j) {
        out.tv.push_back(column_estimate(slots, num_mc, j, nt));
        const McEstimate& e = out.tv.back();
        const double bound = out.initial_tv * 1.05 + 3.0 * e.std_error;
        if (e.mean > bound && out.pass) {
            out.pass = false;
            std::ostringstream os;
            os << "BV bound violated at t=" << out.times[j] << ": mean " << e.mean << " > bound "
               << bound;
            out.failure = os.str();
        }
    }
    return out;
}

MomentResult run_moments(const SolverConfig& cfg, const Field& u0, int num_mc, double p) {
    if (!(p >= 2.0)) throw std::invalid_argument("run_moments: p >= 2 required");
    if (num_mc < 2) throw std::invalid_argument("run_moments: num_mc >= 2 required");
    cfg.validate();

    std::vector<double> sup_slots(static_cast<std::size_t>(num_mc));
    std::vector<double> h_slots(static_cast<std::size_t>(num_mc));
    SimulateOptions opts;
    opts.record_full = true;
    replica_loop(num_mc, [&](int r) {
        SamplePath path{cfg.seed, static_cast<std::uint32_t>(r),
                        static_cast<std::uint32_t>(cfg.noise.truncation()), 0};
        const Trajectory traj = simulate_path(cfg, u0, path, {cfg.t_end}, opts);
        double sup = 0.0;
        for (const Field& u : traj.full_states) sup = std::max(sup, std::pow(lp_norm(u, p), p));
        double hint = 0.0;
        for (std::size_t m = 0; m < traj.steps.size(); ++m) {
            const double nrm = h_lambda_norm(traj.full_states[m], cfg.lambda);
            hint += traj.steps[m].dt * nrm * nrm;
        }
        sup_slots[static_cast<std::size_t>(r)] = sup;
        h_slots[static_cast<std::size_t>(r)] = hint;
    });

    MomentResult out;
    out.p = p;
    out.sup_lp = make_estimate(sup_slots);
    out.h_lambda_integral = make_estimate(h_slots);
    out.implied_constant = out.sup_lp.mean / (1.0 + std::pow(lp_norm(u0, p), p));
    return out;
}

EnergyLedger energy_ledger(const SolverConfig& cfg, const Field& u0) {
    if (cfg.noise.truncation() > 0)
        throw std::invalid_argument("energy_ledger: deterministic runs only");
    cfg.validate();
    SimulateOptions opts;
    opts.record_full = true;
    SamplePath path{cfg.seed, 0, 0, 0};
    const Trajectory traj = simulate_path(cfg, u0, path, {cfg.t_end}, opts);

    EnergyLedger led;
    const double l20 = lp_norm(u0, 2.0);
    led.initial_l2sq = l20 * l20;
    const double l2t = lp_norm(traj.full_states.back(), 2.0);
    led.final_l2sq = l2t * l2t;

    const std::size_t m = u0.size();
    const double h = cfg.grid.spacing();
    for (std::size_t s = 0; s < traj.steps.size(); ++s) {
        const double dt = traj.steps[s].dt;
        const Field& pre = traj.full_states[s];
        const Field& post = traj.full_states[s + 1];

        // explicit degenerate diffusion, product form (summation by parts)
        if (cfg.diffusion.big_b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t ip = (i + 1) % m;
                acc += (pre.values[ip] - pre.values[i]) *
                       (cfg.diffusion.big_b(pre.values[ip]) - cfg.diffusion.big_b(pre.values[i]));
            }
            led.parabolic_dissipation += dt * acc / h;
        }

        // implicit fractional + viscous parts via Parseval on the post state
        const SpectralField sp = dft(post);
        double frac = 0.0, visc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto n = static_cast<double>(std::abs(sp.mode_of(j)));
            const double e = std::norm(sp.coefficients[j]);
            if (cfg.fractional_on) frac += spectral_symbol(cfg.lambda, std::abs(sp.mode_of(j))) * e;
            visc += cfg.viscosity * n * n * e;
        }
        led.fractional_dissipation += dt * kTwoPi * frac;
        led.viscous_dissipation += dt * kTwoPi * visc;
    }
    const double closed = led.final_l2sq + 2.0 * (led.fractional_dissipation +
                                                  led.parabolic_dissipation +
                                                  led.viscous_dissipation);
    led.closure_error = std::abs(closed - led.initial_l2sq) / std::max(led.initial_l2sq, 1e-300);
    return led;
}

PerturbKind perturb_kind_from(const std::string& name) {
    if (name == "initial") return PerturbKind::initial;
    if (name == "lambda") return PerturbKind::lambda;
    if (name == "flux") return PerturbKind::flux;
    if (name == "noise") return PerturbKind::noise;
    if (name == "diffusion") return PerturbKind::diffusion;
    throw std::invalid_argument("unknown perturbation kind: " + name);
}

std::string to_string(PerturbKind k) {
    switch (k) {
        case PerturbKind::initial: return "initial";
        case PerturbKind::lambda: return "lambda";
        case PerturbKind::flux: return "flux";
        case PerturbKind::noise: return "noise";
        case PerturbKind::diffusion: return "diffusion";
    }
    return "?";
}

namespace {

SolverConfig perturbed_config(PerturbKind kind, const SolverConfig& cfg, double eps) {
    SolverConfig out = cfg;
    switch (kind) {
        case PerturbKind::initial:
            break;
        case PerturbKind::lambda: {
            const double beta = cfg.lambda + eps;
            if (!(beta > 0.0) || !(beta < 1.0))
                throw std::invalid_argument("lambda perturbation leaves (0,1)");
            out.lambda = beta;
            break;
        }
        case PerturbKind::flux: {
            const auto f = cfg.flux.eval;
            const auto fp = cfg.flux.deriv;
            out.flux.eval = [f, eps](double xi) { return f(xi) + eps * xi; };
            out.flux.deriv = [fp, eps](double xi) { return fp(xi) + eps; };
            out.flux.name = cfg.flux.name + "+eps*xi";
            if (out.flux.lipschitz) *out.flux.lipschitz += std::abs(eps);
            out.flux_lipschitz = cfg.flux_lipschitz + std::abs(eps);
            break;
        }
        case PerturbKind::noise: {
            const auto base = cfg.noise.base;
            out.noise.base = [base, eps](double x, double u) { return base(x, u) + eps; };
            out.noise.name = cfg.noise.name + "+eps";
            break;
        }
        case PerturbKind::diffusion: {
            const auto sig = cfg.diffusion.sigma;
            auto sig2 = [sig, eps](double xi) { return sig(xi) + eps; };
            out.diffusion.sigma = sig2;
            out.diffusion.a_of = [sig2](double xi) {
                const double s = sig2(xi);
                return s * s;
            };
            auto table = std::make_shared<TabulatedAntiderivative>(out.diffusion.a_of, 16.0,
                                                                   std::size_t{1} << 15);
            out.diffusion.big_b = [table](double xi) { return (*table)(xi); };
            out.diffusion.sigma_sup = cfg.diffusion.sigma_sup + std::abs(eps);
            out.diffusion.name = cfg.diffusion.name + "+eps";
            break;
        }
    }
    return out;
}

double composite_size(PerturbKind kind, const SolverConfig& cfg, const Field& u0, double eps,
                      double r1) {
    switch (kind) {
        case PerturbKind::initial:
            return eps * std::numbers::pi;  // || eps * (1 + cos x)/2 ||_L1
        case PerturbKind::lambda:
            return std::sqrt(kernel_difference_second_moment(cfg.lambda, cfg.lambda + eps, r1)) +
                   tail_translation_term(u0, cfg.lambda, cfg.lambda + eps, r1);
        default:
            return std::abs(eps);
    }
}

}  // namespace

ContinuousDependenceResult run_continuous_dependence(PerturbKind kind, const SolverConfig& cfg,
                                                     const Field& u0, const RatePrediction& rp,
                                                     const std::vector<double>& eps_list,
                                                     int num_mc, double r1) {
    if (num_mc < 2) throw std::invalid_argument("run_continuous_dependence: num_mc >= 2");
    if (eps_list.empty()) throw std::invalid_argument("run_continuous_dependence: empty eps list");

    ContinuousDependenceResult out;
    out.kind = kind;
    out.t_eval = cfg.t_end;
    out.prediction = rp;
    out.predicted = kind == PerturbKind::initial ? 1.0 : rp.predicted_exponent();
    out.epsilons = eps_list;

    // common dt honoring every perturbed configuration's CFL bound
    SolverConfig base = cfg;
    double bound = base.cfl_bound();
    for (double eps : eps_list) bound = std::min(bound, perturbed_config(kind, cfg, eps).cfl_bound());
    const double dt = std::min(cfg.dt > 0.0 ? cfg.dt : bound, 0.95 * bound);
    base.dt = dt;
    base.validate();

    for (double eps : eps_list) {
        SolverConfig pert = perturbed_config(kind, base, eps);
        pert.dt = dt;
        Field u0b = u0;
        if (kind == PerturbKind::initial)
            for (std::size_t i = 0; i < u0b.size(); ++i)
                u0b.values[i] += eps * 0.5 * (1.0 + std::cos(u0.grid.x(i)));

        std::vector<double> slots(static_cast<std::size_t>(num_mc));
        replica_loop(num_mc, [&](int r) {
            SamplePath path{base.seed, static_cast<std::uint32_t>(r),
                            static_cast<std::uint32_t>(std::max(base.noise.truncation(),
                                                                pert.noise.truncation())),
                            0};
            const CoupledResult cr =
                coupled_simulate(base, pert, u0, u0b, path, {base.t_end});
            slots[static_cast<std::size_t>(r)] = cr.distances.back();
        });
        out.fit.sizes.push_back(composite_size(kind, base, u0, eps, r1));
        out.fit.distances.push_back(make_estimate(slots));
    }

    // log-log least squares over points above the Monte Carlo noise floor
    std::vector<double> lx, ly;
    double smin = 0.0, smax = 0.0;
    for (std::size_t j = 0; j < out.fit.sizes.size(); ++j) {
        const double s = out.fit.sizes[j];
        const McEstimate& e = out.fit.distances[j];
        if (!(s > 0.0) || !(e.mean > 0.0) || e.mean <= 3.0 * e.std_error) continue;
        lx.push_back(std::log(s));
        ly.push_back(std::log(e.mean));
        smin = lx.size() == 1 ? s : std::min(smin, s);
        smax = lx.size() == 1 ? s : std::max(smax, s);
    }
    out.fit.usable_points = lx.size();
    if (lx.size() < 4) {
        out.degenerate = true;
        out.failure = "rate fit: fewer than 4 points above the noise floor";
        return out;
    }
    if (smax / smin < 10.0 * 0.95) {
        out.degenerate = true;
        out.failure = "rate fit: usable sizes span less than a decade";
        return out;
    }

    const auto n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
        mx += lx[j];
        my += ly[j];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
        sxx += (lx[j] - mx) * (lx[j] - mx);
        sxy += (lx[j] - mx) * (ly[j] - my);
    }
    out.fit.fitted_slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
        const double pred = my + out.fit.fitted_slope * (lx[j] - mx);
        ss_res += (ly[j] - pred) * (ly[j] - pred);
    }
    out.fit.slope_std_error = lx.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;

    // fitted-constant envelope C * size^predicted dominating every usable point
    double c_fit = 0.0;
    for (std::size_t j = 0; j < out.fit.sizes.size(); ++j) {
        const double s = out.fit.sizes[j];
        const McEstimate& e = out.fit.distances[j];
        if (!(s > 0.0) || !(e.mean > 0.0) || e.mean <= 3.0 * e.std_error) continue;
        c_fit = std::max(c_fit, e.mean / std::pow(s, out.predicted));
    }
    out.envelope_constant = c_fit;
    for (double s : out.fit.sizes)
        out.envelope.push_back(s > 0.0 ? c_fit * std::pow(s, out.predicted) : 0.0);

    out.pass = out.fit.fitted_slope >= out.predicted - 0.15;
    if (!out.pass) {
        std::ostringstream os;
        os << "fitted slope " << out.fit.fitted_slope << " below predicted " << out.predicted
           << " - 0.15";
        out.failure = os.str();
    }
    return out;
}

}  // namespace fraclaws
