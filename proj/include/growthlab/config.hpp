#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "growthlab/params.hpp"

namespace growthlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Experiment { Bgp, Grid, Transition, Trap, Policy, Nonrivalry, Accumulation };

enum class TransitionRuns { Both, Constrained, Unconstrained };

// One experiment per scenario, flat key = value lines, '#' comments.
struct ScenarioConfig {
    ModelParams params;
    Experiment experiment = Experiment::Bgp;
    std::string out_dir = "out";

    // transition / trap options
    double dt = 0.1;
    double horizon = 1000.0;
    double perturbation_scale = 1e-6;
    double tolerance = 1e-6;
    double target_g_n = 0.0;
    TransitionRuns runs = TransitionRuns::Both;
    std::vector<double> starts = {1e-4, 0.02};
    std::vector<double> s_values = {0.0, 0.078, kUnbounded};
    std::vector<std::string> columns; // empty: all columns

    // grid options
    double xi_min = 0.3, xi_max = 0.8;
    double zeta_min = 0.5, zeta_max = 0.95;
    double grid_step = 0.05;
    std::vector<double> sigmas = {1.5, 2.5};

    // nonrivalry options
    std::vector<double> c0_values = {0.2, 1.0, 4.0, 14.0};
    double crossover_min = 4.0, crossover_max = 30.0;

    // accumulation options
    double kappa = 0.1;
    double accum_horizon = 500.0;

    // policy options
    std::vector<double> tax_rates = {0.5, 1.0, 2.0};
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    if (v == "unbounded") return kUnbounded;
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + v + "'");
    }
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: key '" + key + "' has an empty list element");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' has an empty list");
    return out;
}

inline std::vector<std::string> parse_string_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace detail

inline Experiment parse_experiment(const std::string& v) {
    if (v == "bgp") return Experiment::Bgp;
    if (v == "grid") return Experiment::Grid;
    if (v == "transition") return Experiment::Transition;
    if (v == "trap") return Experiment::Trap;
    if (v == "policy") return Experiment::Policy;
    if (v == "nonrivalry") return Experiment::Nonrivalry;
    if (v == "accumulation") return Experiment::Accumulation;
    throw ConfigError("config: unknown experiment '" + v + "'");
}

inline std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Bgp: return "bgp";
        case Experiment::Grid: return "grid";
        case Experiment::Transition: return "transition";
        case Experiment::Trap: return "trap";
        case Experiment::Policy: return "policy";
        case Experiment::Nonrivalry: return "nonrivalry";
        case Experiment::Accumulation: return "accumulation";
    }
    return "bgp";
}

inline ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    bool have_experiment = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (val.empty())
            throw ConfigError("config: key '" + key + "' has an empty value");

        auto num = [&] { return detail::parse_double(key, val); };
        ModelParams& p = cfg.params;

        if (key == "experiment") {
            cfg.experiment = parse_experiment(val);
            have_experiment = true;
        } else if (key == "n") p.n = num();
        else if (key == "rho") p.rho = num();
        else if (key == "gamma") p.gamma = num();
        else if (key == "sigma") p.sigma = num();
        else if (key == "xi") p.xi = num();
        else if (key == "zeta") p.zeta = num();
        else if (key == "beta") p.beta = num();
        else if (key == "psi") p.psi = num();
        else if (key == "eta") p.eta = num();
        else if (key == "s") p.s = num();
        else if (key == "theta") p.theta = num();
        else if (key == "phi_cost") p.phi_cost = num();
        else if (key == "alpha") p.alpha = num();
        else if (key == "epsilon") p.epsilon = num();
        else if (key == "c0") p.c0 = num();
        else if (key == "M") p.M = num();
        else if (key == "delta") p.delta = num();
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "dt") cfg.dt = num();
        else if (key == "horizon") cfg.horizon = num();
        else if (key == "perturbation_scale") cfg.perturbation_scale = num();
        else if (key == "tolerance") cfg.tolerance = num();
        else if (key == "target_g_n") cfg.target_g_n = num();
        else if (key == "runs") {
            if (val == "both") cfg.runs = TransitionRuns::Both;
            else if (val == "constrained") cfg.runs = TransitionRuns::Constrained;
            else if (val == "unconstrained") cfg.runs = TransitionRuns::Unconstrained;
            else throw ConfigError("config: key 'runs' must be both|constrained|unconstrained, got '" + val + "'");
        }
        else if (key == "starts") cfg.starts = detail::parse_double_list(key, val);
        else if (key == "s_values") cfg.s_values = detail::parse_double_list(key, val);
        else if (key == "columns") cfg.columns = detail::parse_string_list(val);
        else if (key == "xi_min") cfg.xi_min = num();
        else if (key == "xi_max") cfg.xi_max = num();
        else if (key == "zeta_min") cfg.zeta_min = num();
        else if (key == "zeta_max") cfg.zeta_max = num();
        else if (key == "grid_step") cfg.grid_step = num();
        else if (key == "sigmas") cfg.sigmas = detail::parse_double_list(key, val);
        else if (key == "c0_values") cfg.c0_values = detail::parse_double_list(key, val);
        else if (key == "crossover_min") cfg.crossover_min = num();
        else if (key == "crossover_max") cfg.crossover_max = num();
        else if (key == "kappa") cfg.kappa = num();
        else if (key == "accum_horizon") cfg.accum_horizon = num();
        else if (key == "tax_rates") cfg.tax_rates = detail::parse_double_list(key, val);
        else
            throw ConfigError("config: unknown key '" + key + "'");
    }
    if (!have_experiment)
        throw ConfigError("config: missing required key 'experiment'");
    return cfg;
}

inline ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot read file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace growthlab
