#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "growthlab/bgp.hpp"
#include "growthlab/params.hpp"

namespace growthlab {

// Gross subsidy rates that align the decentralized R&D labor share with
// the planner's. tau_labor multiplies the R&D wage bill (a subsidy when
// below 1), tau_profit multiplies patent profits (a subsidy when above 1);
// the two closed forms are exact reciprocals.
struct PolicyRates {
    double tau_labor = std::numeric_limits<double>::quiet_NaN();
    double tau_profit = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
};

namespace detail {
// Shared core of the two subsidy formulas:
//   numerator   = (1-beta) * [(sigma-xi) n + xi rho - (sigma-xi)(1-zeta) g*]
//   denominator = gamma g* + rho - n
inline void subsidy_pieces(const ModelParams& p, long double& num, long double& den) {
    const BgpSolution b = bgp_decentralized(p);
    const long double g = b.g_star;
    const long double sx = (long double)p.sigma - (long double)p.xi;
    num = (1.0L - (long double)p.beta) *
          (sx * (long double)p.n + (long double)p.xi * (long double)p.rho -
           sx * (1.0L - (long double)p.zeta) * g);
    den = (long double)p.gamma * g + (long double)p.rho - (long double)p.n;
}
} // namespace detail

inline PolicyRates optimal_labor_subsidy(const ModelParams& p) {
    if (!(p.sigma > p.xi))
        throw std::domain_error("optimal_labor_subsidy: requires sigma > xi");
    long double num, den;
    detail::subsidy_pieces(p, num, den);
    PolicyRates out;
    out.tau_labor = (double)(num / den);
    out.valid = out.tau_labor > 0.0 && out.tau_labor < 1.0;
    return out;
}

inline PolicyRates optimal_profit_subsidy(const ModelParams& p) {
    if (!(p.sigma > p.xi))
        throw std::domain_error("optimal_profit_subsidy: requires sigma > xi");
    long double num, den;
    detail::subsidy_pieces(p, num, den);
    PolicyRates out;
    out.tau_profit = (double)(den / num);
    out.valid = out.tau_profit > 1.0;
    return out;
}

inline PolicyRates optimal_subsidies(const ModelParams& p) {
    PolicyRates out;
    out.tau_labor = optimal_labor_subsidy(p).tau_labor;
    out.tau_profit = optimal_profit_subsidy(p).tau_profit;
    out.valid = out.tau_labor > 0.0 && out.tau_labor < 1.0 && out.tau_profit > 1.0;
    return out;
}

// R&D labor share term under a gross wage subsidy tau:
//   Theta_D' = tau (gamma + (rho-n)/g*) / ((1-xi)(1-beta)).
inline double theta_d_subsidized(const ModelParams& p, double tau) {
    const BgpSolution b = bgp_decentralized(p);
    const long double g = b.g_star;
    return (double)((long double)tau *
                    ((long double)p.gamma + ((long double)p.rho - (long double)p.n) / g) /
                    ((1.0L - (long double)p.xi) * (1.0L - (long double)p.beta)));
}

struct PolicyReport {
    PolicyRates rates;
    double theta_d_subsidized = 0.0; // Theta_D' at tau_labor
    double theta_s = 0.0;
    double share_gap_after_subsidy = 0.0; // subsidized share minus planner share
};

inline PolicyReport policy_report(const ModelParams& p) {
    PolicyReport rep;
    rep.rates = optimal_subsidies(p);
    rep.theta_d_subsidized = theta_d_subsidized(p, rep.rates.tau_labor);
    rep.theta_s = labor_share_planner(p).theta_aux;
    rep.share_gap_after_subsidy =
        1.0 / (1.0 + rep.theta_d_subsidized) - 1.0 / (1.0 + rep.theta_s);
    return rep;
}

// Neutrality of a constant tax on data purchases. With a constant rate the
// taxed free-entry condition leaves the BGP growth-rate system unchanged:
//   (zeta-gamma) g_N + (xi-sigma) g_phi = -n   (data side, g_tau = 0)
//   (zeta-1)     g_N + xi          g_phi = -n   (labor side)
// We re-solve this 2x2 system per tax rate and compare against the closed
// forms, recompute the labor share through the free-entry-of-labor route
// (tax-free, so it must match the untaxed share), and check that the
// product term tau * N phi^-1 p_phi^-1 required for consistency is the
// same constant at every rate.
struct DataTaxCell {
    double tax_rate = 1.0;
    double g_star_deviation = 0.0;
    double g_phi_deviation = 0.0;
    double s_rd_deviation = 0.0;
    double product_term = 0.0;
};

struct DataTaxReport {
    std::vector<DataTaxCell> cells;
    double max_deviation = 0.0;
    // the growth rate the tax itself would need on the BGP; zero means a
    // constant tax, which is exactly what neutrality requires
    double g_tau_identity = 0.0;
    bool neutral = false;
};

inline DataTaxReport data_tax_neutrality_check(const ModelParams& p,
                                               const std::vector<double>& tax_rates) {
    const BgpSolution b = bgp_decentralized(p);
    const LaborShares sh = labor_share_decentralized(p);
    DataTaxReport rep;

    rep.g_tau_identity = (p.zeta - p.gamma) * b.g_star + (p.xi - p.sigma) * b.g_phi_star + p.n;

    const double a11 = p.zeta - p.gamma, a12 = p.xi - p.sigma;
    const double a21 = p.zeta - 1.0, a22 = p.xi;
    const double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-14)
        throw std::runtime_error("data_tax_neutrality_check: singular BGP system");

    for (double tau : tax_rates) {
        if (!(tau > 0.0))
            throw std::invalid_argument("data_tax_neutrality_check: tax rates must be positive");
        DataTaxCell cell;
        cell.tax_rate = tau;
        // Cramer solve of the constant-tax system (the tax enters only
        // through g_tau, which is zero for a constant rate)
        const double g_N = (-p.n * a22 - a12 * -p.n) / det;
        const double g_phi = (a11 * -p.n - -p.n * a21) / det;
        cell.g_star_deviation = std::abs(g_N - b.g_star);
        cell.g_phi_deviation = std::abs(g_phi - b.g_phi_star);
        // labor-route share: the tax term never enters this chain
        const double theta = (p.gamma * g_N + p.rho - p.n) /
                             (g_N * (1.0 - p.xi) * (1.0 - p.beta));
        cell.s_rd_deviation = std::abs(1.0 / (1.0 + theta) - sh.s_rd);
        // product term tau * N phi^-1 p_phi^-1 implied by the data route;
        // constancy across rates is the neutrality mechanism
        const double l_R = sh.s_rd;
        const double k_required =
            (1.0 - l_R) * p.xi * b.g_star * std::pow(p.psi, 1.0 - 1.0 / p.beta) * p.beta /
            ((p.gamma * b.g_star + p.rho - p.n) *
             std::pow(1.0 - p.beta, 1.0 - 2.0 / p.beta) * tau);
        cell.product_term = tau * k_required;
        rep.max_deviation = std::max({rep.max_deviation, cell.g_star_deviation,
                                      cell.g_phi_deviation, cell.s_rd_deviation});
        rep.cells.push_back(cell);
    }
    rep.neutral = rep.max_deviation <= 1e-12;
    return rep;
}

} // namespace growthlab
