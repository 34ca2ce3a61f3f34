#include "fraclaws/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace fraclaws {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    std::ostringstream os;
    os << "config line " << line << ": " << msg;
    throw ConfigError(os.str());
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double parse_double(const std::string& v, std::size_t line, const std::string& key) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail(line, "key " + key + ": not a number: '" + v + "'");
    }
    if (pos != v.size()) fail(line, "key " + key + ": trailing characters in '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& v, std::size_t line, const std::string& key) {
    std::size_t pos = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        fail(line, "key " + key + ": not a nonnegative integer: '" + v + "'");
    }
    if (pos != v.size()) fail(line, "key " + key + ": trailing characters in '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    fail(line, "key " + key + ": expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, std::size_t line, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, "key " + key + ": empty list element");
        out.push_back(parse_double(item, line, key));
    }
    if (out.empty()) fail(line, "key " + key + ": empty list");
    return out;
}

struct KeyEntry {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string&, std::size_t, const std::string&)> set;
};

std::vector<KeyEntry> key_table() {
    auto D = [](double RunConfig::* f) {
        return [f](RunConfig& c, const std::string& v, std::size_t ln, const std::string& k) {
            c.*f = parse_double(v, ln, k);
        };
    };
    auto S = [](std::string RunConfig::* f) {
        return [f](RunConfig& c, const std::string& v, std::size_t, const std::string&) {
            c.*f = v;
        };
    };
    auto B = [](bool RunConfig::* f) {
        return [f](RunConfig& c, const std::string& v, std::size_t ln, const std::string& k) {
            c.*f = parse_bool(v, ln, k);
        };
    };
    auto Z = [](std::size_t RunConfig::* f) {
        return [f](RunConfig& c, const std::string& v, std::size_t ln, const std::string& k) {
            c.*f = static_cast<std::size_t>(parse_u64(v, ln, k));
        };
    };
    auto L = [](std::vector<double> RunConfig::* f) {
        return [f](RunConfig& c, const std::string& v, std::size_t ln, const std::string& k) {
            c.*f = parse_list(v, ln, k);
        };
    };
    return {
        {"grid", "m", Z(&RunConfig::grid_m)},
        {"solver", "lambda", D(&RunConfig::lambda)},
        {"solver", "fractional", B(&RunConfig::fractional)},
        {"solver", "tau", D(&RunConfig::tau)},
        {"solver", "dt", D(&RunConfig::dt)},
        {"solver", "t_end", D(&RunConfig::t_end)},
        {"solver", "scheme", S(&RunConfig::scheme)},
        {"solver", "cfl_safety", D(&RunConfig::cfl_safety)},
        {"solver", "seed",
         [](RunConfig& c, const std::string& v, std::size_t ln, const std::string& k) {
             c.seed = parse_u64(v, ln, k);
         }},
        {"flux", "name", S(&RunConfig::flux_name)},
        {"flux", "param", D(&RunConfig::flux_param)},
        {"flux", "regularize", B(&RunConfig::flux_regularize)},
        {"flux", "regularize_tau", D(&RunConfig::flux_regularize_tau)},
        {"diffusion", "name", S(&RunConfig::diffusion_name)},
        {"diffusion", "param", D(&RunConfig::diffusion_param)},
        {"diffusion", "gamma", D(&RunConfig::diffusion_gamma)},
        {"noise", "name", S(&RunConfig::noise_name)},
        {"noise", "amp", D(&RunConfig::noise_amp)},
        {"noise", "truncation", Z(&RunConfig::noise_truncation)},
        {"initial", "kind", S(&RunConfig::initial_kind)},
        {"initial", "amplitude", D(&RunConfig::initial_amplitude)},
        {"initial", "value", D(&RunConfig::initial_value)},
        {"initial", "path", S(&RunConfig::initial_path)},
        {"experiment", "name", S(&RunConfig::experiment)},
        {"experiment", "num_mc",
         [](RunConfig& c, const std::string& v, std::size_t ln, const std::string& k) {
             c.num_mc = static_cast<int>(parse_u64(v, ln, k));
         }},
        {"experiment", "times", L(&RunConfig::times)},
        {"experiment", "p", D(&RunConfig::p)},
        {"experiment", "kind", S(&RunConfig::perturb_kind)},
        {"experiment", "epsilons", L(&RunConfig::epsilons)},
        {"experiment", "r1", D(&RunConfig::r1)},
        {"experiment", "lambda_g1", D(&RunConfig::lambda_g1)},
        {"experiment", "lambda_g2", D(&RunConfig::lambda_g2)},
        {"experiment", "gamma_b", D(&RunConfig::gamma_b)},
        {"experiment", "offset", D(&RunConfig::offset)},
        {"experiment", "taus", L(&RunConfig::taus)},
        {"experiment", "xi_bins", Z(&RunConfig::xi_bins)},
        {"output", "dir", S(&RunConfig::out_dir)},
        {"output", "dump_fields", B(&RunConfig::dump_fields)},
    };
}

void check_name(const std::string& value, const std::vector<std::string>& allowed,
                const std::string& key) {
    if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
    std::ostringstream os;
    os << "key " << key << ": '" << value << "' not in {";
    for (std::size_t i = 0; i < allowed.size(); ++i) os << (i ? ", " : "") << allowed[i];
    os << "}";
    throw ConfigError(os.str());
}

void validate(const RunConfig& c) {
    if (c.grid_m < 8 || (c.grid_m & (c.grid_m - 1)) != 0)
        throw ConfigError("key grid.m: must be a power of two >= 8");
    if (!(c.lambda > 0.0 && c.lambda < 1.0))
        throw ConfigError("key solver.lambda: must lie in (0,1)");
    if (c.tau < 0.0) throw ConfigError("key solver.tau: must be >= 0");
    if (c.dt < 0.0) throw ConfigError("key solver.dt: must be >= 0 (0 = auto)");
    if (c.t_end < 0.0) throw ConfigError("key solver.t_end: must be >= 0");
    if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0))
        throw ConfigError("key solver.cfl_safety: must lie in (0,1]");
    check_name(c.scheme, {"lax_friedrichs", "engquist_osher"}, "solver.scheme");
    check_name(c.flux_name, {"zero", "linear", "burgers"}, "flux.name");
    check_name(c.diffusion_name, {"zero", "constant", "degenerate-power", "degenerate-band"},
               "diffusion.name");
    check_name(c.noise_name, {"none", "multiplicative", "additive", "bounded-multiplicative"},
               "noise.name");
    check_name(c.initial_kind, {"sin", "mixed", "constant", "step", "file"}, "initial.kind");
    check_name(c.experiment,
               {"simulate", "verify-operator", "contraction", "bv", "moments", "rates",
                "kinetic-residual", "viscosity-sweep"},
               "experiment.name");
    if (c.noise_name != "none" && c.noise_truncation == 0)
        throw ConfigError("key noise.truncation: must be > 0 for a nonzero noise family");
    if (c.num_mc < 2) throw ConfigError("key experiment.num_mc: must be >= 2");
    if (!(c.p >= 2.0)) throw ConfigError("key experiment.p: must be >= 2");
    if (c.xi_bins < 4) throw ConfigError("key experiment.xi_bins: must be >= 4");
    if (c.initial_kind == "file" && c.initial_path.empty())
        throw ConfigError("key initial.path: required for initial.kind = file");
    if (c.experiment == "rates") {
        check_name(c.perturb_kind, {"initial", "lambda", "flux", "noise", "diffusion"},
                   "experiment.kind");
        if (c.epsilons.empty())
            throw ConfigError("key experiment.epsilons: required for experiment.name = rates");
    }
    if (c.experiment == "viscosity-sweep" && c.taus.empty())
        throw ConfigError("key experiment.taus: required for experiment.name = viscosity-sweep");
    if (!(c.r1 > 0.0)) throw ConfigError("key experiment.r1: must be > 0");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    const auto table = key_table();
    RunConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const auto& e : table) known = known || section == e.section;
            if (!known) fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) fail(line_no, "key before any [section] header");
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for key " + key);

        const KeyEntry* hit = nullptr;
        for (const auto& e : table)
            if (section == e.section && key == e.key) hit = &e;
        if (!hit) {
            std::string best;
            std::size_t best_d = 1000;
            for (const auto& e : table) {
                const std::size_t d = edit_distance(key, e.key) +
                                      (section == e.section ? 0 : 2);
                if (d < best_d) {
                    best_d = d;
                    best = std::string(e.section) + "." + e.key;
                }
            }
            fail(line_no, "unknown key " + section + "." + key + " (did you mean " + best + "?)");
        }
        try {
            hit->set(cfg, value, line_no, section + "." + key);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(line_no, std::string("key ") + key + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace fraclaws
