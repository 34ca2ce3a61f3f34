#include "fraclaws/config.hpp"
#include "fraclaws/experiments.hpp"
#include "fraclaws/fractional.hpp"
#include "fraclaws/kinetic.hpp"
#include "fraclaws/registry.hpp"
#include "fraclaws/solver.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace fraclaws {

namespace {

using ordered_json = nlohmann::ordered_json;

Field make_initial(const RunConfig& rc, const TorusGrid& grid) {
    if (rc.initial_kind == "file") return read_field_binary(rc.initial_path);
    Field u(grid);
    for (std::size_t i = 0; i < grid.m; ++i) {
        const double x = grid.x(i);
        if (rc.initial_kind == "sin")
            u.values[i] = rc.initial_value + rc.initial_amplitude * std::sin(x);
        else if (rc.initial_kind == "mixed")  // generic band-limited profile
            u.values[i] = rc.initial_value +
                          rc.initial_amplitude * (std::sin(x) + 0.4 * std::cos(2.0 * x));
        else if (rc.initial_kind == "constant")
            u.values[i] = rc.initial_value;
        else  // step: raised plateau on the middle half of the torus
            u.values[i] = rc.initial_value +
                          (x >= 0.5 * std::numbers::pi && x < 1.5 * std::numbers::pi
                               ? rc.initial_amplitude
                               : 0.0);
    }
    return u;
}

SolverConfig make_solver_config(const RunConfig& rc, const Field& u0) {
    SolverConfig cfg;
    cfg.grid = TorusGrid(rc.grid_m);
    cfg.lambda = rc.lambda;
    cfg.fractional_on = rc.fractional;
    cfg.viscosity = rc.tau;
    cfg.t_end = rc.t_end;
    cfg.scheme = rc.scheme == "engquist_osher" ? FluxScheme::engquist_osher
                                               : FluxScheme::lax_friedrichs;
    cfg.seed = rc.seed;
    cfg.cfl_safety = rc.cfl_safety;
    cfg.flux = make_flux(rc.flux_name, rc.flux_param);
    if (rc.flux_regularize) {
        const double tau_reg =
            rc.flux_regularize_tau > 0.0 ? rc.flux_regularize_tau : std::max(rc.tau, 1e-3);
        cfg.flux = regularize_flux(cfg.flux, tau_reg);
    }
    cfg.diffusion = make_diffusion(rc.diffusion_name, rc.diffusion_param, rc.diffusion_gamma);
    cfg.noise = make_noise(rc.noise_name, rc.noise_amp, rc.noise_truncation);
    const double radius = 2.0 * lp_norm(u0, kInfNorm) + 2.0;
    cfg.flux_lipschitz = cfg.flux.lipschitz_on(radius);
    cfg.dt = rc.dt > 0.0 ? rc.dt : cfg.cfl_bound();
    return cfg;
}

ordered_json config_echo(const RunConfig& c) {
    return ordered_json{
        {"grid", {{"m", c.grid_m}}},
        {"solver",
         {{"lambda", c.lambda},
          {"fractional", c.fractional},
          {"tau", c.tau},
          {"dt", c.dt},
          {"t_end", c.t_end},
          {"scheme", c.scheme},
          {"cfl_safety", c.cfl_safety},
          {"seed", c.seed}}},
        {"flux",
         {{"name", c.flux_name},
          {"param", c.flux_param},
          {"regularize", c.flux_regularize},
          {"regularize_tau", c.flux_regularize_tau}}},
        {"diffusion",
         {{"name", c.diffusion_name}, {"param", c.diffusion_param}, {"gamma", c.diffusion_gamma}}},
        {"noise",
         {{"name", c.noise_name}, {"amp", c.noise_amp}, {"truncation", c.noise_truncation}}},
        {"initial",
         {{"kind", c.initial_kind},
          {"amplitude", c.initial_amplitude},
          {"value", c.initial_value},
          {"path", c.initial_path}}},
        {"experiment",
         {{"name", c.experiment},
          {"num_mc", c.num_mc},
          {"times", c.times},
          {"p", c.p},
          {"kind", c.perturb_kind},
          {"epsilons", c.epsilons},
          {"r1", c.r1},
          {"lambda_g1", c.lambda_g1},
          {"lambda_g2", c.lambda_g2},
          {"gamma_b", c.gamma_b},
          {"offset", c.offset},
          {"taus", c.taus},
          {"xi_bins", c.xi_bins}}},
        {"output", {{"dir", c.out_dir}, {"dump_fields", c.dump_fields}}},
    };
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << header << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

std::vector<double> default_times(const RunConfig& rc) {
    if (!rc.times.empty()) return rc.times;
    std::vector<double> t;
    for (int j = 1; j <= 4; ++j) t.push_back(rc.t_end * static_cast<double>(j) / 4.0);
    return t;
}

struct Assertions {
    ordered_json list = ordered_json::array();
    bool all = true;

    void add(const std::string& name, bool pass, const std::string& detail = "") {
        list.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
        all = all && pass;
    }
};

void do_simulate(const RunConfig& rc, const SolverConfig& cfg, const Field& u0,
                 const std::filesystem::path& dir, ordered_json& results, Assertions& as) {
    SamplePath path{cfg.seed, 0, static_cast<std::uint32_t>(cfg.noise.truncation()), 0};
    SimulateOptions opts;
    opts.record_diagnostics = true;
    opts.diagnostics_p = rc.p;
    const Trajectory traj = simulate_path(cfg, u0, path, default_times(rc), opts);

    std::vector<std::vector<double>> rows;
    for (const auto& d : traj.diagnostics)
        rows.push_back({d.t, d.mass, d.l1, d.l2, d.lp, d.tv, d.viscous_dissipation});
    write_csv(dir / "diagnostics.csv", "t,mass,l1,l2,lp,tv,viscous_dissipation", rows);

    rows.clear();
    for (std::size_t s = 0; s < traj.times.size(); ++s)
        for (std::size_t i = 0; i < traj.states[s].size(); ++i)
            rows.push_back({traj.times[s], traj.states[s].grid.x(i), traj.states[s].values[i]});
    write_csv(dir / "snapshots.csv", "t,x,value", rows);

    if (rc.dump_fields)
        for (std::size_t s = 0; s < traj.times.size(); ++s) {
            char name[48];
            std::snprintf(name, sizeof name, "field_%03zu.bin", s);
            write_field_binary(traj.states[s], (dir / name).string());
        }

    const Field& uf = traj.states.back();
    results["num_snapshots"] = traj.times.size();
    results["final"] = {{"t", traj.times.back()},
                        {"mass", mean(uf)},
                        {"l1", lp_norm(uf, 1.0)},
                        {"l2", lp_norm(uf, 2.0)},
                        {"tv", total_variation(uf)}};
    as.add("finite_final_state", uf.all_finite());
}

void do_verify_operator(const RunConfig& rc, const SolverConfig& cfg,
                        const std::filesystem::path& dir, ordered_json& results,
                        Assertions& as) {
    const TorusGrid grid = cfg.grid;
    const double h = grid.spacing();
    struct Probe {
        std::string name;
        Field f;
    };
    std::vector<Probe> probes;
    Field c1(grid), s1(grid), mixed(grid);
    for (std::size_t i = 0; i < grid.m; ++i) {
        const double x = grid.x(i);
        c1.values[i] = std::cos(x);
        s1.values[i] = std::sin(x);
        mixed.values[i] = std::cos(2.0 * x) + 0.5 * std::sin(3.0 * x);
    }
    probes.push_back({"cos_x", c1});
    probes.push_back({"sin_x", s1});
    probes.push_back({"cos2x_plus_half_sin3x", mixed});

    ordered_json table = ordered_json::array();
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (const auto& pr : probes) {
        const Field sp = apply_spectral(pr.f, cfg.lambda);
        const Field qd = apply_quadrature(pr.f, cfg.lambda, h, 50.0);
        const double rel = lp_norm(sp - qd, 2.0) / std::max(lp_norm(sp, 2.0), 1e-300);
        worst = std::max(worst, rel);
        table.push_back({{"field", pr.name}, {"relative_l2_error", rel}});
        rows.push_back({static_cast<double>(rows.size()), rel});
    }
    write_csv(dir / "operator_errors.csv", "probe_index,relative_l2_error", rows);
    write_symbol_csv(cfg.lambda, static_cast<long>(grid.m / 2), (dir / "symbol.csv").string());

    // eigenfunction check: g^lambda cos = psi_lambda(1) cos
    const Field sp = apply_spectral(c1, cfg.lambda);
    double eig_err = 0.0;
    for (std::size_t i = 0; i < grid.m; ++i)
        eig_err = std::max(eig_err, std::abs(sp.values[i] - spectral_symbol(cfg.lambda, 1) *
                                                                std::cos(grid.x(i))));
    results["cross_check"] = table;
    results["worst_relative_l2_error"] = worst;
    results["eigenfunction_abs_error"] = eig_err;
    as.add("quadrature_matches_spectral", worst <= 1e-3);
    as.add("spectral_eigenfunction", eig_err <= 1e-8);
    (void)rc;
}

void do_contraction(const RunConfig& rc, const SolverConfig& cfg, const Field& u0,
                    const std::filesystem::path& dir, ordered_json& results, Assertions& as) {
    Field u0b = u0;
    for (double& v : u0b.values) v += rc.offset;
    const ContractionResult res = run_contraction(cfg, u0, u0b, rc.num_mc, default_times(rc));
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < res.times.size(); ++j)
        rows.push_back({res.times[j], res.distance[j].mean, res.distance[j].std_error});
    write_csv(dir / "contraction.csv", "t,mean_l1_distance,std_error", rows);
    results["initial_distance"] = res.initial_distance;
    results["final_distance"] = res.distance.back().mean;
    as.add("l1_contraction", res.pass, res.failure);
}

void do_bv(const RunConfig& rc, const SolverConfig& cfg, const Field& u0,
           const std::filesystem::path& dir, ordered_json& results, Assertions& as) {
    const BvResult res = run_bv(cfg, u0, rc.num_mc, default_times(rc));
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < res.times.size(); ++j)
        rows.push_back({res.times[j], res.tv[j].mean, res.tv[j].std_error});
    write_csv(dir / "bv.csv", "t,mean_tv,std_error", rows);
    results["initial_tv"] = res.initial_tv;
    results["final_tv"] = res.tv.back().mean;
    as.add("bv_bound", res.pass, res.failure);
}

void do_moments(const RunConfig& rc, const SolverConfig& cfg, const Field& u0,
                const std::filesystem::path& dir, ordered_json& results, Assertions& as) {
    const MomentResult res = run_moments(cfg, u0, rc.num_mc, rc.p);
    results["p"] = res.p;
    results["sup_lp"] = {{"mean", res.sup_lp.mean},
                         {"std_error", res.sup_lp.std_error},
                         {"num_samples", res.sup_lp.num_samples}};
    results["h_lambda_integral"] = {{"mean", res.h_lambda_integral.mean},
                                    {"std_error", res.h_lambda_integral.std_error}};
    results["implied_constant"] = res.implied_constant;
    as.add("moment_finite",
           std::isfinite(res.sup_lp.mean) && std::isfinite(res.h_lambda_integral.mean));

    // noise-free L2 energy ledger on the same coefficients
    SolverConfig det = cfg;
    det.noise = make_noise("none", 0.0, 0);
    const EnergyLedger led = energy_ledger(det, u0);
    results["energy_ledger"] = {{"initial_l2sq", led.initial_l2sq},
                                {"final_l2sq", led.final_l2sq},
                                {"fractional_dissipation", led.fractional_dissipation},
                                {"parabolic_dissipation", led.parabolic_dissipation},
                                {"viscous_dissipation", led.viscous_dissipation},
                                {"closure_error", led.closure_error}};
    std::vector<std::vector<double>> rows{{res.sup_lp.mean, res.sup_lp.std_error,
                                           res.h_lambda_integral.mean,
                                           res.h_lambda_integral.std_error, led.closure_error}};
    write_csv(dir / "moments.csv",
              "sup_lp_mean,sup_lp_se,h_lambda_integral_mean,h_lambda_integral_se,"
              "energy_closure_error",
              rows);
}

void do_rates(const RunConfig& rc, const SolverConfig& cfg, const Field& u0,
              const std::filesystem::path& dir, ordered_json& results, Assertions& as) {
    RatePrediction rp;
    rp.lambda_g1 = rc.lambda_g1;
    rp.lambda_g2 = rc.lambda_g2;
    rp.gamma_b = rc.gamma_b > 0.0 ? rc.gamma_b : rc.diffusion_gamma;
    const ContinuousDependenceResult res = run_continuous_dependence(
        perturb_kind_from(rc.perturb_kind), cfg, u0, rp, rc.epsilons, rc.num_mc, rc.r1);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < res.fit.sizes.size(); ++j)
        rows.push_back({res.epsilons[j], res.fit.sizes[j], res.fit.distances[j].mean,
                        res.fit.distances[j].std_error, res.envelope[j]});
    write_csv(dir / "rates.csv", "epsilon,composite_size,mean_l1_distance,std_error,envelope",
              rows);
    results["kind"] = to_string(res.kind);
    results["predicted_exponent"] = res.predicted;
    results["fitted_slope"] = res.fit.fitted_slope;
    results["slope_std_error"] = res.fit.slope_std_error;
    results["usable_points"] = res.fit.usable_points;
    results["envelope_constant"] = res.envelope_constant;
    results["degenerate"] = res.degenerate;
    as.add("rate_fit_not_degenerate", !res.degenerate, res.degenerate ? res.failure : "");
    if (!res.degenerate) as.add("fitted_slope_above_prediction", res.pass, res.failure);
}

void do_kinetic_residual(const RunConfig& rc, const SolverConfig& cfg, const Field& u0,
                         const std::filesystem::path& dir, ordered_json& results,
                         Assertions& as) {
    SamplePath path{cfg.seed, 0, static_cast<std::uint32_t>(cfg.noise.truncation()), 0};
    SimulateOptions opts;
    opts.record_full = true;
    const Trajectory traj = simulate_path(cfg, u0, path, default_times(rc), opts);

    double lo = 0.0, hi = 0.0;
    for (const Field& u : traj.full_states)
        for (double v : u.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double pad = 0.1 * std::max(hi - lo, 1e-6);
    const auto battery = default_test_battery(lo - pad, hi + pad);
    const auto reports = kinetic_residual(traj, cfg, battery);
    write_residual_json(reports, (dir / "residual.json").string());

    std::vector<const Field*> snaps;
    for (const Field& u : traj.states) snaps.push_back(&u);
    const XiGrid xi = make_xi_grid(snaps, rc.xi_bins);
    accumulate_measures(traj, cfg, xi).write_csv((dir / "measures.csv").string());

    double worst = 0.0;
    ordered_json table = ordered_json::array();
    for (const auto& r : reports) {
        worst = std::max(worst, r.normalized_defect);
        table.push_back({{"label", r.label}, {"normalized_defect", r.normalized_defect}});
    }
    results["defects"] = table;
    results["worst_normalized_defect"] = worst;
    as.add("residual_finite", std::isfinite(worst));
}

void do_viscosity_sweep(const RunConfig& rc, const SolverConfig& cfg, const Field& u0,
                        const std::filesystem::path& dir, ordered_json& results,
                        Assertions& as) {
    const auto entries = viscosity_sweep(cfg, rc.taus, u0, rc.num_mc);
    std::vector<std::vector<double>> rows;
    for (const auto& e : entries)
        rows.push_back({e.tau_coarse, e.tau_fine, e.mean_distance, e.std_error});
    write_csv(dir / "viscosity_sweep.csv", "tau_coarse,tau_fine,mean_l1_distance,std_error",
              rows);
    bool decreasing = true;
    for (std::size_t j = 1; j < entries.size(); ++j)
        decreasing = decreasing && entries[j].mean_distance < entries[j - 1].mean_distance;
    ordered_json table = ordered_json::array();
    for (const auto& e : entries)
        table.push_back({{"tau_coarse", e.tau_coarse},
                         {"tau_fine", e.tau_fine},
                         {"mean", e.mean_distance},
                         {"std_error", e.std_error}});
    results["pairs"] = table;
    results["strictly_decreasing"] = decreasing;
    as.add("cauchy_distances_decreasing", entries.size() < 2 || decreasing);
}

}  // namespace

int run(const RunConfig& rc) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::filesystem::path dir(rc.out_dir);
    std::filesystem::create_directories(dir);

    const TorusGrid grid(rc.grid_m);
    const Field u0 = make_initial(rc, grid);
    if (u0.grid != grid) throw std::invalid_argument("initial field does not match grid.m");
    SolverConfig cfg = make_solver_config(rc, u0);

    ordered_json summary;
    summary["experiment"] = rc.experiment;
    summary["config"] = config_echo(rc);
    summary["resolved"] = {{"dt", cfg.dt},
                           {"cfl_bound", cfg.cfl_bound()},
                           {"flux_lipschitz", cfg.flux_lipschitz},
                           {"num_steps", cfg.dt > 0.0 ? std::ceil(cfg.t_end / cfg.dt) : 0.0}};

    ordered_json results;
    Assertions as;
    if (rc.experiment == "simulate")
        do_simulate(rc, cfg, u0, dir, results, as);
    else if (rc.experiment == "verify-operator")
        do_verify_operator(rc, cfg, dir, results, as);
    else if (rc.experiment == "contraction")
        do_contraction(rc, cfg, u0, dir, results, as);
    else if (rc.experiment == "bv")
        do_bv(rc, cfg, u0, dir, results, as);
    else if (rc.experiment == "moments")
        do_moments(rc, cfg, u0, dir, results, as);
    else if (rc.experiment == "rates")
        do_rates(rc, cfg, u0, dir, results, as);
    else if (rc.experiment == "kinetic-residual")
        do_kinetic_residual(rc, cfg, u0, dir, results, as);
    else if (rc.experiment == "viscosity-sweep")
        do_viscosity_sweep(rc, cfg, u0, dir, results, as);
    else
        throw std::invalid_argument("unknown experiment: " + rc.experiment);

    summary["results"] = results;
    summary["assertions"] = as.list;
    summary["pass"] = as.all;
    const auto t1 = std::chrono::steady_clock::now();
    summary["wall_time_seconds"] = std::chrono::duration<double>(t1 - t0).count();

    std::ofstream out(dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << summary.dump(2) << "\n";
    return as.all ? 0 : 2;
}

}  // namespace fraclaws
