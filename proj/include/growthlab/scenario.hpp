#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "growthlab/bgp.hpp"
#include "growthlab/config.hpp"
#include "growthlab/csv.hpp"
#include "growthlab/nonrivalry.hpp"
#include "growthlab/params.hpp"
#include "growthlab/policy.hpp"
#include "growthlab/transition.hpp"
#include "growthlab/version.hpp"

namespace growthlab {

using ordered_json = nlohmann::ordered_json;

// Exit statuses of run_scenario. Validation covers config parsing and
// parameter-domain failures; non-convergence covers solver failures.
enum ExitStatus : int { kOk = 0, kValidationFailure = 2, kSolverFailure = 3 };

namespace detail {

inline ordered_json params_json(const ModelParams& p) {
    ordered_json j;
    j["n"] = p.n;
    j["rho"] = p.rho;
    j["gamma"] = p.gamma;
    j["sigma"] = p.sigma;
    j["xi"] = p.xi;
    j["zeta"] = p.zeta;
    j["beta"] = p.beta;
    j["psi"] = p.psi;
    j["eta"] = p.eta;
    if (p.s == kUnbounded)
        j["s"] = "unbounded";
    else
        j["s"] = p.s;
    j["theta"] = p.theta;
    j["phi_cost"] = p.phi_cost;
    j["alpha"] = p.alpha;
    j["epsilon"] = p.epsilon;
    j["c0"] = p.c0;
    j["M"] = p.M;
    j["delta"] = p.delta;
    return j;
}

inline ModelParams params_from_json(const ordered_json& j) {
    ModelParams p;
    p.n = j.at("n").get<double>();
    p.rho = j.at("rho").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.xi = j.at("xi").get<double>();
    p.zeta = j.at("zeta").get<double>();
    p.beta = j.at("beta").get<double>();
    p.psi = j.at("psi").get<double>();
    p.eta = j.at("eta").get<double>();
    if (j.at("s").is_string())
        p.s = kUnbounded;
    else
        p.s = j.at("s").get<double>();
    p.theta = j.at("theta").get<double>();
    p.phi_cost = j.at("phi_cost").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.epsilon = j.at("epsilon").get<double>();
    p.c0 = j.at("c0").get<double>();
    p.M = j.at("M").get<double>();
    p.delta = j.at("delta").get<double>();
    return p;
}

inline std::string s_label(double s) {
    return s == kUnbounded ? "unbounded" : format_number(s);
}

// ---- tables ----

inline Table bgp_table(const ModelParams& p) {
    Table t;
    t.columns = {"regime", "g_star", "g_phi_star", "g_mu_star", "r_star", "s_rd", "theta"};
    const BgpSolution d = bgp_decentralized(p);
    const LaborShares ld = labor_share_decentralized(p);
    const BgpSolution s = bgp_planner(p);
    const LaborShares ls = labor_share_planner(p);
    t.add_row({"decentralized", format_number(d.g_star), format_number(d.g_phi_star),
               format_number(d.g_mu_star), format_number(d.r_star), format_number(ld.s_rd),
               format_number(ld.theta_aux)});
    t.add_row({"planner", format_number(s.g_star), format_number(s.g_phi_star),
               format_number(s.g_mu_star), format_number(s.r_star), format_number(ls.s_rd),
               format_number(ls.theta_aux)});
    return t;
}

inline Table grid_table(const std::vector<MisallocationCell>& cells) {
    Table t;
    t.columns = {"xi", "zeta", "sigma", "s_rd_planner", "s_rd_decentralized",
                 "gap", "overuse_ratio", "feasible"};
    for (const auto& c : cells)
        t.add_row({format_number(c.xi), format_number(c.zeta), format_number(c.sigma),
                   format_number(c.s_rd_planner), format_number(c.s_rd_decentralized),
                   format_number(c.gap), format_number(c.overuse_ratio),
                   format_flag(c.feasible)});
    return t;
}

inline Table trajectory_table(const Trajectory& tr) {
    Table t;
    t.columns = {"t", "g_N", "g_mu", "l_E", "g_c", "g_phi",
                 "phi_level", "phi_cumulative", "binding"};
    for (const auto& s : tr.samples)
        t.add_row({format_number(s.t), format_number(s.g_N), format_number(s.g_mu),
                   format_number(s.l_E), format_number(s.g_c), format_number(s.g_phi),
                   format_number(s.phi_level), format_number(s.phi_cumulative),
                   format_flag(s.binding)});
    return t;
}

inline Table policy_table(const PolicyReport& r) {
    Table t;
    t.columns = {"tau_labor", "tau_profit", "theta_d_subsidized", "theta_s",
                 "share_gap_after_subsidy"};
    t.add_row({format_number(r.rates.tau_labor), format_number(r.rates.tau_profit),
               format_number(r.theta_d_subsidized), format_number(r.theta_s),
               format_number(r.share_gap_after_subsidy)});
    return t;
}

inline Table data_tax_table(const DataTaxReport& r) {
    Table t;
    t.columns = {"tax_rate", "g_star_deviation", "g_phi_deviation", "s_rd_deviation",
                 "product_term"};
    for (const auto& c : r.cells)
        t.add_row({format_number(c.tax_rate), format_number(c.g_star_deviation),
                   format_number(c.g_phi_deviation), format_number(c.s_rd_deviation),
                   format_number(c.product_term)});
    return t;
}

inline Table roots_table(const std::vector<std::pair<double, FixedPointReport>>& dec_runs,
                         const FixedPointReport& planner, double planner_c0) {
    Table t;
    t.columns = {"regime", "c0", "root", "in_unit_interval", "residual"};
    for (const auto& [c0, rep] : dec_runs)
        for (const Root& r : rep.roots)
            t.add_row({"decentralized", format_number(c0), format_number(r.value),
                       format_flag(r.in_unit_interval), format_number(r.residual)});
    for (const Root& r : planner.roots)
        t.add_row({"planner", format_number(planner_c0), format_number(r.value),
                   format_flag(r.in_unit_interval), format_number(r.residual)});
    return t;
}

inline Table trap_table(const TrapReport& rep) {
    Table t;
    t.columns = {"start_g_N", "s", "arrival_time", "converged"};
    for (const auto& c : rep.cells)
        t.add_row({format_number(c.start_g_N), s_label(c.s),
                   format_number(c.arrival_time), format_flag(c.converged)});
    return t;
}

inline Table accumulation_table(const AccumulationReport& rep) {
    Table t;
    t.columns = {"t", "abs_gap"};
    for (const auto& [tt, gap] : rep.decay)
        t.add_row({format_number(tt), format_number(gap)});
    return t;
}

inline ordered_json shooting_json(const Trajectory& tr) {
    ordered_json j;
    j["converged"] = tr.converged;
    j["chattering"] = tr.chattering;
    j["direction"] = {tr.diagnostics.direction[0], tr.diagnostics.direction[1],
                      tr.diagnostics.direction[2]};
    j["scale"] = tr.diagnostics.scale;
    j["candidates_tried"] = tr.diagnostics.candidates_tried;
    j["refinement_iterations"] = tr.diagnostics.refinement_iterations;
    j["best_score"] = tr.diagnostics.best_score;
    j["steps"] = tr.diagnostics.steps;
    j["stop_reason"] = tr.diagnostics.stop_reason;
    j["note"] = tr.note;
    return j;
}

} // namespace detail

// Everything an experiment produces, staged in memory. Files are written
// only after the whole experiment has computed, so a failure mid-way
// leaves no partial artifacts.
struct ScenarioResult {
    int exit_code = kOk;
    std::vector<std::pair<std::string, std::string>> files; // name -> content
    std::vector<std::string> errors;
    ordered_json options; // experiment-specific echo for the manifest
};

namespace detail {

inline ScenarioResult run_bgp(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.files.push_back({"bgp.csv", render_csv(bgp_table(cfg.params))});
    return res;
}

inline ScenarioResult run_grid(const ScenarioConfig& cfg) {
    ScenarioResult res;
    GridRanges gr;
    gr.xi_lo = cfg.xi_min;
    gr.xi_hi = cfg.xi_max;
    gr.zeta_lo = cfg.zeta_min;
    gr.zeta_hi = cfg.zeta_max;
    gr.step = cfg.grid_step;
    gr.sigmas = cfg.sigmas;
    const auto cells = misallocation_grid(cfg.params, gr);
    Table t = grid_table(cells);
    res.files.push_back({"grid.csv", render_csv(t, cfg.columns)});
    res.options = {{"xi_min", gr.xi_lo},   {"xi_max", gr.xi_hi}, {"zeta_min", gr.zeta_lo},
                   {"zeta_max", gr.zeta_hi}, {"grid_step", gr.step}, {"sigmas", gr.sigmas}};
    return res;
}

inline ScenarioResult run_transition(const ScenarioConfig& cfg) {
    ScenarioResult res;
    ShootingConfig sc;
    sc.dt = cfg.dt;
    sc.horizon = cfg.horizon;
    sc.perturbation_scale = cfg.perturbation_scale;
    sc.tolerance = cfg.tolerance;
    sc.target_g_N = cfg.target_g_n;

    ordered_json diag;
    auto one = [&](bool constrained) {
        const Trajectory tr = solve_transition(cfg.params, sc, constrained);
        const char* tag = constrained ? "constrained" : "unconstrained";
        res.files.push_back({std::string("trajectory_") + tag + ".csv",
                             render_csv(trajectory_table(tr), cfg.columns)});
        diag[tag] = shooting_json(tr);
        if (!tr.converged) {
            res.exit_code = kSolverFailure;
            res.errors.push_back(std::string(tag) + " transition did not converge: " + tr.note);
        }
    };
    if (cfg.runs != TransitionRuns::Constrained) one(false);
    if (cfg.runs != TransitionRuns::Unconstrained) one(true);
    res.files.push_back({"shooting_diagnostics.json", diag.dump(2) + "\n"});
    res.options = {{"dt", sc.dt},
                   {"horizon", sc.horizon},
                   {"perturbation_scale", sc.perturbation_scale},
                   {"tolerance", sc.tolerance},
                   {"target_g_n", sc.target_g_N}};
    return res;
}

inline ScenarioResult run_trap(const ScenarioConfig& cfg) {
    ScenarioResult res;
    ShootingConfig sc;
    sc.dt = cfg.dt;
    sc.horizon = cfg.horizon;
    sc.perturbation_scale = cfg.perturbation_scale;
    sc.tolerance = cfg.tolerance;

    const TrapReport rep = growth_trap_experiment(cfg.params, cfg.starts, cfg.s_values, sc);
    res.files.push_back({"trap_summary.csv", render_csv(trap_table(rep))});

    ordered_json j;
    j["partial_catch_up"] = rep.partial_catch_up;
    j["strictly_between"] = rep.strictly_between;
    j["delay_at_s0"] = rep.delay_at_s0;
    j["note"] = rep.note;
    res.files.push_back({"trap_diagnostics.json", j.dump(2) + "\n"});

    ordered_json svals = ordered_json::array();
    for (double s : rep.s_values) svals.push_back(s_label(s));
    res.options = {{"starts", rep.starts}, {"s_values", svals}, {"dt", sc.dt},
                   {"horizon", sc.horizon}};
    for (const auto& c : rep.cells)
        if (!c.converged) {
            res.exit_code = kSolverFailure;
            res.errors.push_back("trap cell (start=" + format_number(c.start_g_N) +
                                 ", s=" + s_label(c.s) + ") did not reach the target");
        }
    return res;
}

inline ScenarioResult run_policy(const ScenarioConfig& cfg) {
    ScenarioResult res;
    const PolicyReport rep = policy_report(cfg.params);
    res.files.push_back({"policy.csv", render_csv(policy_table(rep))});
    const DataTaxReport tax = data_tax_neutrality_check(cfg.params, cfg.tax_rates);
    res.files.push_back({"data_tax.csv", render_csv(data_tax_table(tax))});
    res.options = {{"tax_rates", cfg.tax_rates}};
    if (!rep.rates.valid) {
        res.exit_code = kSolverFailure;
        res.errors.push_back("no valid subsidy pair at these parameters");
    }
    return res;
}

inline ScenarioResult run_nonrivalry(const ScenarioConfig& cfg) {
    ScenarioResult res;
    ResaleProblem prob = ResaleProblem::from_params(cfg.params);

    std::vector<std::pair<double, FixedPointReport>> dec_runs;
    for (double c0 : cfg.c0_values) {
        ResaleProblem pc = prob;
        pc.c0 = c0;
        dec_runs.push_back({c0, fixed_point_decentralized(pc)});
    }
    const FixedPointReport planner = fixed_point_planner(prob);
    res.files.push_back(
        {"roots.csv", render_csv(roots_table(dec_runs, planner, prob.c0))});

    const CrossoverResult cross =
        creative_destruction_crossover(prob, cfg.crossover_min, cfg.crossover_max);
    ordered_json j;
    j["planner_variant"] = planner.variant;
    j["planner_note"] = planner.note;
    j["crossover_found"] = cross.found;
    if (cross.found)
        j["crossover_c0"] = cross.c0_star;
    else
        j["crossover_note"] = cross.note;
    j["d_S"] = cross.d_S;
    res.files.push_back({"nonrivalry_summary.json", j.dump(2) + "\n"});
    res.options = {{"c0_values", cfg.c0_values},
                   {"crossover_min", cfg.crossover_min},
                   {"crossover_max", cfg.crossover_max}};
    return res;
}

inline ScenarioResult run_accumulation(const ScenarioConfig& cfg) {
    ScenarioResult res;
    const AccumulationReport rep =
        accumulation_equivalence(cfg.params, cfg.kappa, cfg.accum_horizon);
    Table t = accumulation_table(rep);
    res.files.push_back({"accumulation.csv", render_csv(t)});
    ordered_json j;
    j["kappa"] = rep.kappa;
    j["horizon"] = rep.horizon;
    j["g_phi_star"] = rep.g_phi_star;
    j["g_Phi_at_T"] = rep.g_Phi_at_T;
    j["abs_gap"] = rep.abs_gap;
    j["stable"] = rep.stable;
    j["warning"] = rep.warning;
    res.files.push_back({"accumulation_summary.json", j.dump(2) + "\n"});
    res.options = {{"kappa", cfg.kappa}, {"accum_horizon", cfg.accum_horizon}};
    return res;
}

} // namespace detail

inline std::string resolve_out_dir(const std::string& configured) {
    const char* env = std::getenv("GROWTHLAB_OUT");
    if (env && *env) return std::string(env) + "/" + configured;
    return configured;
}

// Computes the experiment fully in memory, then writes artifacts and a
// manifest with per-file checksums. Returns the process exit status.
inline int run_scenario(const ScenarioConfig& cfg, std::ostream& err = std::cerr) {
    const ValidationReport vr = validate_params(cfg.params);
    if (!vr.valid) {
        for (const auto& v : vr.violated_conditions)
            err << "parameter validation: " << v.condition << " (" << v.bound << ")\n";
        return kValidationFailure;
    }

    ScenarioResult res;
    try {
        switch (cfg.experiment) {
            case Experiment::Bgp: res = detail::run_bgp(cfg); break;
            case Experiment::Grid: res = detail::run_grid(cfg); break;
            case Experiment::Transition: res = detail::run_transition(cfg); break;
            case Experiment::Trap: res = detail::run_trap(cfg); break;
            case Experiment::Policy: res = detail::run_policy(cfg); break;
            case Experiment::Nonrivalry: res = detail::run_nonrivalry(cfg); break;
            case Experiment::Accumulation: res = detail::run_accumulation(cfg); break;
        }
    } catch (const CsvError& e) {
        err << "output error: " << e.what() << "\n";
        return kValidationFailure; // unknown column names are config mistakes
    } catch (const std::domain_error& e) {
        err << "parameter domain error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << "\n";
        return kSolverFailure;
    }

    for (const auto& m : res.errors) err << m << "\n";

    const std::string out = resolve_out_dir(cfg.out_dir);
    std::filesystem::create_directories(out);

    ordered_json manifest;
    manifest["version"] = GROWTHLAB_VERSION;
    manifest["experiment"] = experiment_name(cfg.experiment);
    manifest["params"] = detail::params_json(cfg.params);
    manifest["options"] = res.options.is_null() ? ordered_json::object() : res.options;
    ordered_json files = ordered_json::object();
    for (const auto& [name, content] : res.files) files[name] = checksum_hex(content);
    manifest["files"] = files;

    for (const auto& [name, content] : res.files) write_file(out + "/" + name, content);
    write_file(out + "/manifest.json", manifest.dump(2) + "\n");
    return res.exit_code;
}

inline int run_scenario_file(const std::string& path, std::ostream& err = std::cerr) {
    ScenarioConfig cfg;
    try {
        cfg = parse_config_file(path);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kValidationFailure;
    }
    return run_scenario(cfg, err);
}

// ---- presets ----

struct Preset {
    std::string name;
    std::string description;
    std::string config;
};

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"figure1-grid",
         "labor misallocation heat-map grid over (xi, zeta) at sigma = 1.5 and 2.5",
         "experiment = grid\nout_dir = out/figure1-grid\n"},
        {"figure2-sigma15",
         "transitional dynamics at sigma = 1.5, constrained (s = 0) and unconstrained",
         "experiment = transition\nsigma = 1.5\ns = 0\nruns = both\n"
         "out_dir = out/figure2-sigma15\n"},
        {"figure2-sigma20",
         "transitional dynamics at sigma = 2.0, constrained (s = 0) and unconstrained",
         "experiment = transition\nsigma = 2.0\ns = 0\nruns = both\n"
         "out_dir = out/figure2-sigma20\n"},
        {"figure2-sigma25",
         "transitional dynamics at sigma = 2.5, constrained (s = 0) and unconstrained",
         "experiment = transition\nsigma = 2.5\ns = 0\nruns = both\n"
         "out_dir = out/figure2-sigma25\n"},
        {"figure2-sigma30",
         "transitional dynamics at sigma = 3.0, constrained (s = 0) and unconstrained",
         "experiment = transition\nsigma = 3.0\ns = 0\nruns = both\n"
         "out_dir = out/figure2-sigma30\n"},
        {"figure3-trap",
         "growth-trap arrival times from laggard and advanced starts at s in {0, 0.078, unbounded}",
         "experiment = trap\nstarts = 1e-4, 0.02\ns_values = 0, 0.078, unbounded\n"
         "out_dir = out/figure3-trap\n"},
        {"figureEC3-levels",
         "flow and cumulative data-provision levels along the unconstrained transition",
         "experiment = transition\nruns = unconstrained\n"
         "columns = t, g_phi, phi_level, phi_cumulative\n"
         "out_dir = out/figureEC3-levels\n"},
        {"policy-subsidies",
         "optimal labor/profit subsidy pair, subsidized labor shares, and data-tax neutrality table",
         "experiment = policy\nout_dir = out/policy-subsidies\n"},
        {"nonrivalry-table",
         "resale-proportion roots d_D (several c0) and d_S, with the creative-destruction crossover",
         "experiment = nonrivalry\nout_dir = out/nonrivalry-table\n"},
        {"accumulation-check",
         "flow-vs-stock data accumulation equivalence |g_Phi(T) - g_phi*| decay",
         "experiment = accumulation\nkappa = 0.1\naccum_horizon = 500\n"
         "out_dir = out/accumulation-check\n"},
    };
    return list;
}

inline const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

} // namespace growthlab
