#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "growthlab/params.hpp"

namespace growthlab {

enum class Regime {
    DecentralizedConsumerOwned,
    Planner,
    FirmOwned,
    FirmOwnedConstrained,
    ConsumerOwnedConstrained,
};

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::DecentralizedConsumerOwned: return "decentralized";
        case Regime::Planner: return "planner";
        case Regime::FirmOwned: return "firm_owned";
        case Regime::FirmOwnedConstrained: return "firm_owned_constrained";
        case Regime::ConsumerOwnedConstrained: return "consumer_owned_constrained";
    }
    return "unknown";
}

// Balanced-growth-path rates for one institutional variant. g_mu_star is
// NaN for the ownership variants where the shadow-price rate has no
// closed form.
struct BgpSolution {
    double g_star = 0.0;     // common growth rate of c, y, N
    double g_phi_star = 0.0; // growth rate of per-capita data provision
    double g_mu_star = 0.0;  // growth rate of the technology shadow price
    double r_star = 0.0;     // BGP interest rate
    Regime regime = Regime::DecentralizedConsumerOwned;
    bool constraint_binding = false;
    bool feasible = true;
    std::string infeasible_reason;
    double planner_bound = std::numeric_limits<double>::quiet_NaN();
};

struct LaborShares {
    double s_rd = 0.0;      // R&D labor share, 1/(1+Theta)
    double theta_aux = 0.0; // the Theta term
    Regime regime = Regime::DecentralizedConsumerOwned;
    bool valid = true;
};

// Closed forms evaluated in long double; rounded to double on return only.

inline BgpSolution bgp_decentralized(const ModelParams& p) {
    const long double den =
        (1.0L - (long double)p.zeta) * (long double)p.sigma -
        (long double)p.xi * (1.0L - (long double)p.gamma);
    if (!(den > 0.0L))
        throw std::domain_error("bgp_decentralized: growth denominator not positive");

    BgpSolution out;
    out.regime = Regime::DecentralizedConsumerOwned;
    const long double g = (long double)p.sigma * (long double)p.n / den;
    const long double gphi = (1.0L - (long double)p.gamma) * (long double)p.n / den;
    const long double gmu =
        (((long double)p.sigma * (1.0L - (long double)p.zeta) - (long double)p.xi) /
         (long double)p.xi) * g -
        ((long double)p.sigma / (long double)p.xi) * (long double)p.n;
    out.g_star = (double)g;
    out.g_phi_star = (double)gphi;
    out.g_mu_star = (double)gmu;
    out.r_star = (double)((long double)p.gamma * g + (long double)p.rho);
    return out;
}

inline BgpSolution bgp_planner(const ModelParams& p) {
    if (!(p.sigma > p.xi))
        throw std::domain_error("bgp_planner: requires sigma > xi");

    BgpSolution out = bgp_decentralized(p);
    out.regime = Regime::Planner;
    // Upper limit on feasible planner growth; can only bind when gamma < 1.
    out.planner_bound =
        (double)((((long double)p.n +
                   (long double)p.xi * (long double)p.rho /
                       ((long double)p.sigma - (long double)p.xi)) /
                  (1.0L - (long double)p.zeta)));
    out.constraint_binding = (p.gamma < 1.0) && (out.g_star > out.planner_bound);
    return out;
}

inline LaborShares labor_share_decentralized(const ModelParams& p) {
    LaborShares ls;
    ls.regime = Regime::DecentralizedConsumerOwned;
    if (p.n == 0.0) {
        // zero-growth limit: no labor in R&D
        ls.s_rd = 0.0;
        ls.theta_aux = std::numeric_limits<double>::infinity();
        return ls;
    }
    const BgpSolution b = bgp_decentralized(p);
    if (!(b.g_star > 0.0))
        throw std::domain_error("labor_share_decentralized: g* must be positive");
    const long double g = b.g_star;
    const long double theta =
        ((long double)p.gamma * g + (long double)p.rho - (long double)p.n) /
        (g * (1.0L - (long double)p.xi) * (1.0L - (long double)p.beta));
    ls.theta_aux = (double)theta;
    ls.s_rd = (double)(1.0L / (1.0L + theta));
    return ls;
}

inline LaborShares labor_share_planner(const ModelParams& p) {
    if (!(p.sigma > p.xi))
        throw std::domain_error("labor_share_planner: requires sigma > xi");
    LaborShares ls;
    ls.regime = Regime::Planner;
    if (p.n == 0.0) {
        ls.s_rd = 0.0;
        ls.theta_aux = std::numeric_limits<double>::infinity();
        return ls;
    }
    const BgpSolution b = bgp_planner(p);
    const long double g = b.g_star;
    const long double sx = (long double)p.sigma - (long double)p.xi;
    const long double xr = (long double)p.xi * (1.0L - (long double)p.xi);
    const long double theta =
        (sx * (long double)p.n + (long double)p.xi * (long double)p.rho) / (xr * g) -
        sx * (1.0L - (long double)p.zeta) / xr;
    ls.theta_aux = (double)theta;
    ls.s_rd = (double)(1.0L / (1.0L + theta));
    ls.valid = theta >= 0.0L; // negative Theta would put the share above 1
    return ls;
}

// How much more data the decentralized economy uses than the planner at
// equal technology and population. Derived from equating the BGP frontier
// identity g* = eta N^{zeta-1} phi^xi l_R^{1-xi} L across the two regimes:
// ratio = (s_S/s_D)^{(1-xi)/xi}.
inline double data_overuse_ratio(const ModelParams& p) {
    const LaborShares d = labor_share_decentralized(p);
    const LaborShares s = labor_share_planner(p);
    if (!s.valid || !(d.s_rd > 0.0))
        throw std::domain_error("data_overuse_ratio: shares not computable");
    return std::pow(s.s_rd / d.s_rd, (1.0 - p.xi) / p.xi);
}

// Labor income share as a function of the R&D labor share l_R.
inline double labor_income_share(const ModelParams& p, double l_R) {
    if (!(l_R > 0.0) || l_R > 1.0)
        throw std::domain_error("labor_income_share: l_R must be in (0,1]");
    return (1.0 - p.xi) / p.xi / l_R;
}

struct MisallocationCell {
    double xi = 0.0, zeta = 0.0, sigma = 0.0;
    double s_rd_planner = 0.0;
    double s_rd_decentralized = 0.0;
    double gap = 0.0; // planner share minus decentralized share
    double overuse_ratio = 0.0;
    bool feasible = true;
    std::string violation;
};

struct GridRanges {
    double xi_lo = 0.3, xi_hi = 0.8;
    double zeta_lo = 0.5, zeta_hi = 0.95;
    double step = 0.05;
    std::vector<double> sigmas = {1.5, 2.5};
};

// Sweep the (xi, zeta, sigma) region and record the planner/decentralized
// share gap and the overuse ratio per cell. Infeasible cells are flagged,
// never dropped.
inline std::vector<MisallocationCell> misallocation_grid(const ModelParams& base,
                                                         const GridRanges& grid) {
    std::vector<MisallocationCell> cells;
    if (grid.sigmas.empty() || !(grid.step > 0.0)) return cells;
    // integer stepping avoids accumulating float drift in the coordinates
    const int nxi = (int)std::llround((grid.xi_hi - grid.xi_lo) / grid.step);
    const int nze = (int)std::llround((grid.zeta_hi - grid.zeta_lo) / grid.step);
    for (double sg : grid.sigmas) {
        for (int i = 0; i <= nxi; ++i) {
            for (int j = 0; j <= nze; ++j) {
                MisallocationCell cell;
                cell.xi = grid.xi_lo + grid.step * i;
                cell.zeta = grid.zeta_lo + grid.step * j;
                cell.sigma = sg;
                ModelParams p = base;
                p.xi = cell.xi;
                p.zeta = cell.zeta;
                p.sigma = sg;
                ValidationReport rep = validate_params(p);
                if (!rep.valid) {
                    cell.feasible = false;
                    cell.violation = rep.violated_conditions.front().condition;
                    cells.push_back(cell);
                    continue;
                }
                try {
                    LaborShares d = labor_share_decentralized(p);
                    LaborShares s = labor_share_planner(p);
                    if (!s.valid) {
                        cell.feasible = false;
                        cell.violation = "planner_theta_negative";
                        cells.push_back(cell);
                        continue;
                    }
                    cell.s_rd_planner = s.s_rd;
                    cell.s_rd_decentralized = d.s_rd;
                    cell.gap = s.s_rd - d.s_rd;
                    cell.overuse_ratio = data_overuse_ratio(p);
                } catch (const std::exception& e) {
                    cell.feasible = false;
                    cell.violation = e.what();
                }
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

// Growth rates when intermediate firms own the data they harvest. Two
// branches: unconstrained data provision, or provision capped by the
// processing-cost exponent condition.
inline BgpSolution bgp_firm_ownership(const ModelParams& p) {
    if (!(p.theta > 0.0) || !(p.phi_cost > 1.0))
        throw std::domain_error("bgp_firm_ownership: requires theta > 0 and phi_cost > 1");

    BgpSolution out;
    out.g_mu_star = std::numeric_limits<double>::quiet_NaN();
    if (2.0 - p.zeta <= p.xi + p.phi_cost) {
        out.regime = Regime::FirmOwned;
        const long double den =
            (long double)p.phi_cost * (1.0L - (long double)p.zeta) - (long double)p.xi;
        if (!(den > 0.0L)) {
            out.feasible = false;
            out.infeasible_reason = "phi_cost*(1-zeta) <= xi";
            return out;
        }
        out.g_star = (double)(((long double)p.xi + (long double)p.phi_cost) *
                              (long double)p.n / den);
        out.g_phi_star = (double)((2.0L - (long double)p.zeta) * (long double)p.n / den);
    } else {
        out.regime = Regime::FirmOwnedConstrained;
        const long double den = 1.0L - (long double)p.zeta - (long double)p.xi;
        if (!(den > 0.0L)) {
            out.feasible = false;
            out.infeasible_reason = "1-zeta-xi <= 0";
            return out;
        }
        out.g_star = (double)((long double)p.n / den);
        out.g_phi_star = out.g_star;
    }
    out.r_star = p.gamma * out.g_star + p.rho;
    return out;
}

// Consumer ownership when the data-provision growth cap binds on the BGP.
// Above the binding threshold this is just the baseline decentralized path.
inline BgpSolution bgp_consumer_constrained(const ModelParams& p) {
    const BgpSolution base = bgp_decentralized(p);
    const double threshold = base.g_phi_star - base.g_star;
    if (!(p.s < threshold)) {
        BgpSolution out = base;
        out.regime = Regime::ConsumerOwnedConstrained;
        out.constraint_binding = false;
        return out;
    }
    BgpSolution out;
    out.regime = Regime::ConsumerOwnedConstrained;
    out.constraint_binding = true;
    out.g_mu_star = std::numeric_limits<double>::quiet_NaN();
    const long double den = 1.0L - (long double)p.zeta - (long double)p.xi;
    if (!(den > 0.0L)) {
        out.feasible = false;
        out.infeasible_reason = "1-zeta-xi <= 0";
        return out;
    }
    out.g_star = (double)(((long double)p.xi * (long double)p.s + (long double)p.n) / den);
    out.g_phi_star = out.g_star + p.s;
    out.r_star = p.gamma * out.g_star + p.rho;
    return out;
}

} // namespace growthlab
