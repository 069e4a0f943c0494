#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace growthlab {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Structural parameters of the data economy. Defaults are the baseline
// calibration used throughout: n=0.02, rho=0.03, gamma=2.5, sigma=1.5,
// xi=0.5, zeta=0.85, beta=2/3, psi=1-beta.
//
// The data-processing cost exponent is named phi_cost because the symbol
// phi is already taken by the data quantity phi(t).
struct ModelParams {
    double n = 0.02;         // population growth rate
    double rho = 0.03;       // subjective discount rate
    double gamma = 2.5;      // inverse elasticity of intertemporal substitution
    double sigma = 1.5;      // privacy disutility exponent
    double xi = 0.5;         // data share in the innovation frontier
    double zeta = 0.85;      // knowledge spillover exponent
    double beta = 2.0 / 3.0; // labor elasticity in final production
    double psi = 1.0 / 3.0;  // marginal cost of intermediates (normalized to 1-beta)
    double eta = 1.0;        // innovation efficiency
    double s = kUnbounded;   // data-provision growth constraint tightness
    double theta = 1.0;      // data-processing cost scale
    double phi_cost = 4.0;   // data-processing cost exponent, > 1 when theta > 0

    // extension block: historical-data resale with creative destruction
    double alpha = 0.5;    // weight on current data in the resale aggregator
    double epsilon = 50.0; // substitution elasticity between data vintages
    double c0 = 0.2;       // creative-destruction intensity (Poisson rate c0*d^2)
    double M = 1.0;        // resale lag length
    double delta = 0.9;    // vintage discount factor, in (0,1]
};

struct Violation {
    std::string condition; // named condition identifier
    double bound;          // the evaluated bound that was violated
};

struct ValidationReport {
    bool valid = true;
    std::vector<Violation> violated_conditions;
    // soft flags that do not invalidate the parameter set
    std::vector<std::string> flags;

    void violate(const std::string& name, double bound) {
        valid = false;
        violated_conditions.push_back({name, bound});
    }
};

// Existence checks for a unique balanced growth path plus basic range
// invariants. Returns a report instead of throwing so grid sweeps can
// record infeasible cells.
inline ValidationReport validate_params(const ModelParams& p) {
    ValidationReport r;

    if (!(p.xi > 0.0 && p.xi < 1.0)) r.violate("xi_in_(0,1)", p.xi);
    if (!(p.zeta > 0.0)) r.violate("zeta_positive", 0.0);
    if (!(p.zeta < 1.0)) r.violate("zeta_below_one", 1.0);
    if (!(p.beta > 0.0 && p.beta < 1.0)) r.violate("beta_in_(0,1)", p.beta);
    if (!(p.sigma > 1.0)) r.violate("sigma_above_one", 1.0);
    if (!(p.gamma > 0.0)) r.violate("gamma_positive", 0.0);
    if (!(p.n > 0.0)) r.violate("n_positive", 0.0);
    if (!(p.rho > p.n)) r.violate("rho_above_n", p.n);
    if (!(p.psi > 0.0)) r.violate("psi_positive", 0.0);
    if (!(p.eta > 0.0)) r.violate("eta_positive", 0.0);
    if (p.theta > 0.0 && !(p.phi_cost > 1.0)) r.violate("phi_cost_above_one", 1.0);

    // Spillover upper bound for existence of a unique BGP. Two branches
    // depending on gamma; at gamma = 1 both collapse to zeta < 1.
    if (p.gamma >= 1.0) {
        double bound = 1.0 - (p.xi / p.sigma) * (1.0 - p.gamma);
        if (!(p.zeta < bound)) r.violate("zeta_below_spillover_bound_gamma_ge_1", bound);
    } else {
        double bound = 1.0 - (1.0 - p.gamma) * (p.n / p.rho + p.xi / p.sigma);
        if (!(p.zeta < bound)) r.violate("zeta_below_spillover_bound_gamma_lt_1", bound);
    }

    // Planner growth upper limit can bind when gamma < 1; flagged, not fatal.
    if (p.gamma < 1.0 && p.gamma > 0.0 && p.sigma > p.xi) {
        double denom = (1.0 - p.zeta) * p.sigma - p.xi * (1.0 - p.gamma);
        if (denom > 0.0) {
            double g = p.sigma * p.n / denom;
            double limit = (p.n + p.xi * p.rho / (p.sigma - p.xi)) / (1.0 - p.zeta);
            if (g > limit) r.flags.push_back("planner_upper_limit_binds");
        }
    }

    return r;
}

// Per-variety price, quantity, profit, wage, output and patent value on a
// balanced path, given the technology level N and production labor L_E.
struct BgpLevels {
    double p_x;           // intermediate price, psi/(1-beta)
    double x_per_variety; // quantity of each intermediate
    double pi;            // profit flow per variety
    double w;             // wage
    double Y;             // final output
    double V;             // patent value, pi/(r*-n)
};

inline BgpLevels bgp_levels(const ModelParams& p, double N, double L_E, double r_star) {
    if (!(N > 0.0) || !(L_E > 0.0))
        throw std::domain_error("bgp_levels: N and L_E must be positive");
    if (!(r_star > p.n))
        throw std::domain_error("bgp_levels: patent value diverges when r* <= n");

    const double b = p.beta;
    const double base = (1.0 - b) * (1.0 - b) / p.psi;

    BgpLevels lv;
    lv.p_x = p.psi / (1.0 - b);
    lv.x_per_variety = std::pow(base, 1.0 / b) * L_E;
    lv.pi = std::pow(p.psi, 1.0 - 1.0 / b) * b / std::pow(1.0 - b, 1.0 - 2.0 / b) * L_E;
    lv.Y = std::pow(base, 1.0 / b - 1.0) * N * L_E;
    lv.w = b * std::pow(base, 1.0 / b - 1.0) * N;
    lv.V = lv.pi / (r_star - p.n);
    return lv;
}

} // namespace growthlab
