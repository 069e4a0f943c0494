#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "growthlab/bgp.hpp"
#include "growthlab/params.hpp"

namespace growthlab {

// Admissibility guards for the backward integration. The production-labor
// share must stay interior and variety growth must stay positive.
inline constexpr double kLeGuardLo = 1e-6;
inline constexpr double kLeGuardHi = 1.0 - 1e-6;
inline constexpr double kGnFloor = 1e-9;

struct TransitionState {
    double g_N = 0.0;  // growth rate of the variety count
    double g_mu = 0.0; // growth rate of the technology shadow price
    double l_E = 0.0;  // production-sector labor share, interior
    double t = 0.0;
};

struct TrajectorySample {
    double t = 0.0;
    double g_N = 0.0;
    double g_mu = 0.0;
    double l_E = 0.0;
    double g_c = 0.0;
    double g_phi = 0.0;
    double dot_l_E = 0.0;
    double phi_level = 0.0;      // normalized so phi(0) = 1
    double phi_cumulative = 0.0; // running integral of phi
    bool binding = false;
};

struct ShootingDiagnostics {
    std::array<double, 3> direction{0.0, 0.0, 0.0}; // chosen unit perturbation
    double scale = 0.0;
    int candidates_tried = 0;
    int refinement_iterations = 0;
    double best_score = std::numeric_limits<double>::infinity();
    int steps = 0;
    std::string stop_reason;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    bool converged = false;
    bool chattering = false;
    std::string note;
    ShootingDiagnostics diagnostics;
};

struct ShootingConfig {
    double dt = 0.1;
    double horizon = 1000.0; // maximum backward time
    double perturbation_scale = 1e-6;
    // Required starting g_N(0); <= 0 means "as close to zero growth as the
    // admissible region allows", which is also what the scoring targets.
    double target_g_N = 0.0;
    double tolerance = 1e-6;
};

struct OdeRegime {
    bool binding = false;
    double s = kUnbounded;
};

struct OdeRhs {
    double dot_g_N = 0.0;
    double dot_g_mu = 0.0;
    double dot_l_E = 0.0;
    double g_phi = 0.0;
    double g_c = 0.0;
    bool binding = false;
};

// Steady state of the condensed (g_N, g_mu, l_E) system. l_E* is one minus
// the planner's R&D labor share.
inline TransitionState steady_state(const ModelParams& p) {
    if (p.n == 0.0)
        throw std::domain_error("steady_state: degenerate at n = 0, no steady state emitted");
    const BgpSolution b = bgp_decentralized(p);
    const LaborShares s = labor_share_planner(p);
    if (!s.valid)
        throw std::domain_error("steady_state: planner labor share invalid");
    TransitionState st;
    st.g_N = b.g_star;
    st.g_mu = b.g_mu_star;
    st.l_E = 1.0 - s.s_rd;
    st.t = 0.0;
    return st;
}

// Right-hand side of the planner's transitional system.
//
// Unconstrained regime: dot_l_E comes from differentiating the labor
// optimality condition, g_phi from the data optimality condition, and the
// two growth-rate equations share the bracket (zeta-1)g_N + xi*g_phi + n.
//
// Binding regime: the data condition is replaced by the constraint
// g_phi = g_c + s = g_N + dot_l_E/l_E + s, and dot_l_E is re-solved from
// the resulting scalar consistency condition.
inline OdeRhs ode_rhs(const TransitionState& st, const ModelParams& p,
                      const OdeRegime& regime = OdeRegime{}) {
    const double gN = st.g_N, gmu = st.g_mu, lE = st.l_E;
    if (!(lE > 0.0 && lE < 1.0))
        throw std::domain_error("ode_rhs: l_E must be interior");

    const double S = p.sigma - p.xi;
    OdeRhs out;

    if (!regime.binding) {
        const double num = (p.gamma + p.zeta - 1.0 + p.xi * p.zeta / S) * gN +
                           (1.0 + p.xi / S) * gmu + (1.0 + p.xi / S) * p.n;
        const double den = (p.xi * (1.0 - p.xi) / S - p.xi) / (1.0 - lE) - p.gamma / lE;
        if (std::abs(den) < 1e-14)
            throw std::runtime_error("ode_rhs: singular labor denominator (unconstrained)");
        out.dot_l_E = num / den;
        out.g_phi = (gmu + p.zeta * gN - (1.0 - p.xi) * out.dot_l_E / (1.0 - lE) + p.n) / S;
        out.g_c = gN + out.dot_l_E / lE;
    } else {
        const double num = gmu + (p.gamma + p.zeta - 1.0 + p.xi) * gN + p.xi * regime.s + p.n;
        const double den = -(p.gamma + p.xi) / lE - p.xi / (1.0 - lE);
        if (std::abs(den) < 1e-14)
            throw std::runtime_error("ode_rhs: singular labor denominator (binding)");
        out.dot_l_E = num / den;
        out.g_c = gN + out.dot_l_E / lE;
        out.g_phi = out.g_c + regime.s;
        out.binding = true;
    }

    const double bracket = (p.zeta - 1.0) * gN + p.xi * out.g_phi + p.n;
    out.dot_g_mu = (gmu - p.rho + p.n) *
                   (bracket + p.xi * out.dot_l_E / (1.0 - lE) +
                    (1.0 - p.xi - p.zeta) * out.dot_l_E /
                        (p.zeta + (1.0 - p.xi - p.zeta) * lE));
    out.dot_g_N = gN * (bracket - (1.0 - p.xi) * out.dot_l_E / (1.0 - lE));
    return out;
}

namespace detail {

using Vec3 = std::array<double, 3>;

// Pick the regime for the current state: binding when the unconstrained
// data growth would violate g_phi <= g_c + s. The decision is made once
// per step, at the step's start state.
inline OdeRegime pick_regime(const Vec3& y, const ModelParams& p, double s) {
    if (!std::isfinite(s)) return OdeRegime{false, s};
    TransitionState st{y[0], y[1], y[2], 0.0};
    const OdeRhs unc = ode_rhs(st, p, OdeRegime{false, s});
    if (unc.g_phi > unc.g_c + s) return OdeRegime{true, s};
    return OdeRegime{false, s};
}

inline Vec3 rhs_vec(const Vec3& y, const ModelParams& p, const OdeRegime& regime) {
    TransitionState st{y[0], y[1], y[2], 0.0};
    const OdeRhs r = ode_rhs(st, p, regime);
    return {r.dot_g_N, r.dot_g_mu, r.dot_l_E};
}

// One classical RK4 step of the time-reversed system (do_step convention:
// state updated in place).
inline void do_step_backward(Vec3& y, double dt, const ModelParams& p,
                             const OdeRegime& regime) {
    auto f = [&](const Vec3& v) {
        Vec3 r = rhs_vec(v, p, regime);
        return Vec3{-r[0], -r[1], -r[2]};
    };
    const Vec3 k1 = f(y);
    const Vec3 k2 = f({y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1], y[2] + 0.5 * dt * k1[2]});
    const Vec3 k3 = f({y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1], y[2] + 0.5 * dt * k2[2]});
    const Vec3 k4 = f({y[0] + dt * k3[0], y[1] + dt * k3[1], y[2] + dt * k3[2]});
    for (int i = 0; i < 3; ++i)
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

inline bool admissible(const Vec3& y) {
    return y[2] > kLeGuardLo && y[2] < kLeGuardHi && y[0] >= kGnFloor;
}

struct RawBackward {
    std::vector<Vec3> states; // backward order: states[0] is the perturbed start
    std::vector<bool> binding;
    std::string stop_reason;
    bool chattering = false;
};

inline RawBackward integrate_raw(Vec3 y0, const ModelParams& p, double s,
                                 double dt, double horizon) {
    RawBackward out;
    const int max_steps = (int)std::llround(horizon / dt);
    out.states.reserve(max_steps + 1);
    out.binding.reserve(max_steps + 1);

    Vec3 y = y0;
    OdeRegime regime = pick_regime(y, p, s);
    out.states.push_back(y);
    out.binding.push_back(regime.binding);
    out.stop_reason = "horizon";

    int flips = 0, run = 0; // chattering detector: regime flip every step
    bool prev = regime.binding;
    for (int i = 0; i < max_steps; ++i) {
        // A stage state outside the admissible region makes ode_rhs throw;
        // treat that like hitting the boundary (y is only written after all
        // four stages, so it is still the last good state here).
        try {
            do_step_backward(y, dt, p, regime);
        } catch (const std::exception&) {
            out.stop_reason = "rhs_domain";
            break;
        }
        if (!admissible(y)) {
            out.stop_reason = (y[0] < kGnFloor) ? "g_N_floor" : "l_E_guard";
            break;
        }
        try {
            regime = pick_regime(y, p, s);
        } catch (const std::exception&) {
            out.stop_reason = "rhs_domain";
            break;
        }
        if (regime.binding != prev) {
            ++flips;
            run = (run > 0) ? run + 1 : 1;
        } else {
            run = 0;
        }
        if (run > 100) out.chattering = true;
        prev = regime.binding;
        out.states.push_back(y);
        out.binding.push_back(regime.binding);
    }
    (void)flips;
    return out;
}

// Deep-end score of a candidate direction: how close the backward
// trajectory's terminal growth rates get to the target (zero growth by
// default). Directions that never leave the steady-state line score the
// distance of the steady-state rates themselves and lose.
inline double score_direction(const Vec3& dir, const Vec3& ss, const ModelParams& p,
                              double s, const ShootingConfig& cfg) {
    Vec3 y0{ss[0] - cfg.perturbation_scale * dir[0],
            ss[1] - cfg.perturbation_scale * dir[1],
            ss[2] - cfg.perturbation_scale * dir[2]};
    if (!admissible(y0)) return std::numeric_limits<double>::infinity();
    const RawBackward raw = integrate_raw(y0, p, s, cfg.dt, cfg.horizon);
    const Vec3& end = raw.states.back();
    const double target = cfg.target_g_N > 0.0 ? cfg.target_g_N : 0.0;
    return std::hypot(end[0] - target, end[1]);
}

inline Vec3 sphere_dir(double polar, double azimuth) {
    return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
            std::cos(polar)};
}

inline Vec3 normalize(const Vec3& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n == 0.0) return {0.0, 0.0, 1.0};
    return {v[0] / n, v[1] / n, v[2] / n};
}

inline Vec3 slerp(const Vec3& a, const Vec3& b, double t) {
    return normalize({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]),
                      a[2] + t * (b[2] - a[2])});
}

} // namespace detail

// Reverse shooting. Perturb the steady state along the best direction from
// a coordinate-sphere sample (scored by the distance of the trajectory's
// deep-end growth rates from zero, refined by interval bisection on the
// best spherical arc) and integrate the system backward with fixed-step
// RK4 until the horizon or the admissible-region boundary. The result is
// re-indexed forward in time; derived series and data-provision levels
// (phi(0) = 1) are attached. s = infinity disables the constraint branch.
inline Trajectory solve_transition_engine(const ModelParams& p, const ShootingConfig& cfg,
                                          double s) {
    using detail::Vec3;
    if (!(cfg.dt > 0.0) || !(cfg.tolerance > 0.0))
        throw std::invalid_argument("solve_transition: dt and tolerance must be positive");

    const TransitionState ss_state = steady_state(p);
    const Vec3 ss{ss_state.g_N, ss_state.g_mu, ss_state.l_E};

    Trajectory traj;
    traj.diagnostics.scale = cfg.perturbation_scale;

    Vec3 best_dir{0.0, 0.0, 0.0};
    if (cfg.perturbation_scale > 0.0) {
        // Coordinate-sphere sampling: polar x azimuthal grid plus the poles.
        const int npolar = 7, nazimuth = 12;
        double best = std::numeric_limits<double>::infinity();
        double second = best;
        Vec3 second_dir{0.0, 0.0, 1.0};
        auto consider = [&](const Vec3& d) {
            const double sc = detail::score_direction(d, ss, p, s, cfg);
            ++traj.diagnostics.candidates_tried;
            if (sc < best) {
                second = best;
                second_dir = best_dir;
                best = sc;
                best_dir = d;
            } else if (sc < second) {
                second = sc;
                second_dir = d;
            }
        };
        consider({0.0, 0.0, 1.0});
        consider({0.0, 0.0, -1.0});
        for (int i = 1; i < npolar; ++i) {
            const double polar = M_PI * i / npolar;
            for (int j = 0; j < nazimuth; ++j)
                consider(detail::sphere_dir(polar, 2.0 * M_PI * j / nazimuth));
        }
        // Interval refinement along the arc between the two best directions:
        // repeated bisection of the bracketing interval by score comparison.
        if (std::isfinite(second)) {
            double lo = 0.0, hi = 1.0; // arc parameter: 0 = best, 1 = runner-up
            for (int it = 0; it < 20 && hi - lo > 1e-6; ++it) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                const double f1 =
                    detail::score_direction(detail::slerp(best_dir, second_dir, m1), ss, p, s, cfg);
                const double f2 =
                    detail::score_direction(detail::slerp(best_dir, second_dir, m2), ss, p, s, cfg);
                traj.diagnostics.refinement_iterations += 2;
                if (f1 < f2)
                    hi = m2;
                else
                    lo = m1;
            }
            const Vec3 refined = detail::slerp(best_dir, second_dir, 0.5 * (lo + hi));
            const double fref = detail::score_direction(refined, ss, p, s, cfg);
            if (fref < best) {
                best = fref;
                best_dir = refined;
            }
        }
        traj.diagnostics.best_score = best;
        traj.diagnostics.direction = best_dir;
    }

    Vec3 y0{ss[0] - cfg.perturbation_scale * best_dir[0],
            ss[1] - cfg.perturbation_scale * best_dir[1],
            ss[2] - cfg.perturbation_scale * best_dir[2]};
    const detail::RawBackward raw = detail::integrate_raw(y0, p, s, cfg.dt, cfg.horizon);
    traj.diagnostics.steps = (int)raw.states.size() - 1;
    traj.diagnostics.stop_reason = raw.stop_reason;
    traj.chattering = raw.chattering;

    // Re-index forward in time. The backward run's last state is the
    // earliest moment; the perturbed start is the forward-time terminal.
    const size_t nsamp = raw.states.size();
    size_t cut = 0; // index (in forward order) where the required g_N starts
    if (cfg.target_g_N > 0.0) {
        bool found = false;
        for (size_t i = 0; i < nsamp; ++i) {
            const Vec3& y = raw.states[nsamp - 1 - i];
            if (y[0] >= cfg.target_g_N) {
                cut = i;
                found = true;
                break;
            }
        }
        const double reached = raw.states[nsamp - 1 - cut][0];
        const double band = std::max(cfg.tolerance, 0.02 * cfg.target_g_N);
        if (!found || std::abs(reached - cfg.target_g_N) > band) {
            traj.converged = false;
            traj.note = "no perturbation direction reaches the target initial g_N";
            return traj;
        }
    }

    traj.samples.reserve(nsamp - cut);
    for (size_t i = cut; i < nsamp; ++i) {
        const Vec3& y = raw.states[nsamp - 1 - i];
        const bool b = raw.binding[nsamp - 1 - i];
        TransitionState st{y[0], y[1], y[2], (double)(i - cut) * cfg.dt};
        const OdeRhs r = ode_rhs(st, p, OdeRegime{b, s});
        TrajectorySample smp;
        smp.t = st.t;
        smp.g_N = y[0];
        smp.g_mu = y[1];
        smp.l_E = y[2];
        smp.g_c = r.g_c;
        smp.g_phi = r.g_phi;
        smp.dot_l_E = r.dot_l_E;
        smp.binding = b;
        traj.samples.push_back(smp);
    }

    // Data-provision levels: phi(0) = 1, left-endpoint exponential
    // accumulation, cumulative integral by trapezoid.
    if (!traj.samples.empty()) {
        traj.samples[0].phi_level = 1.0;
        traj.samples[0].phi_cumulative = 0.0;
        for (size_t i = 1; i < traj.samples.size(); ++i) {
            const double prev = traj.samples[i - 1].phi_level;
            traj.samples[i].phi_level = prev * std::exp(traj.samples[i - 1].g_phi * cfg.dt);
            traj.samples[i].phi_cumulative =
                traj.samples[i - 1].phi_cumulative +
                0.5 * cfg.dt * (prev + traj.samples[i].phi_level);
        }
    }

    // Converged when the forward-time terminal sits within tolerance of the
    // steady state (max-norm).
    if (!traj.samples.empty()) {
        const TrajectorySample& last = traj.samples.back();
        const double dist = std::max({std::abs(last.g_N - ss[0]), std::abs(last.g_mu - ss[1]),
                                      std::abs(last.l_E - ss[2])});
        traj.converged = dist <= cfg.tolerance;
        if (!traj.converged) traj.note = "terminal state not within tolerance of steady state";
    }
    return traj;
}

// Unconstrained reverse shooting.
inline Trajectory integrate_backward(const ModelParams& p, const ShootingConfig& cfg) {
    return solve_transition_engine(p, cfg, kUnbounded);
}

// Full transition solve. Constrained runs switch to the binding regime on
// any step where the unconstrained data growth would exceed g_c + s.
inline Trajectory solve_transition(const ModelParams& p, const ShootingConfig& cfg,
                                   bool constrained) {
    return solve_transition_engine(p, cfg, constrained ? p.s : kUnbounded);
}

struct TrapCell {
    double start_g_N = 0.0;
    double s = kUnbounded;
    double arrival_time = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
};

struct TrapReport {
    std::vector<TrapCell> cells; // row-major: starts x s_values
    std::vector<double> starts;
    std::vector<double> s_values;
    // lagging economy = smallest start, leading = largest start
    bool partial_catch_up = false;
    bool strictly_between = false; // middle-s run strictly between extremes
    double delay_at_s0 = std::numeric_limits<double>::quiet_NaN();
    std::string note;

    double arrival(size_t i_start, size_t i_s) const {
        return cells[i_start * s_values.size() + i_s].arrival_time;
    }
};

// Compare transition lengths across starting points and privacy-policy
// tightness. Arrival = first time g_N comes within 1% of g*, measured from
// the moment the trajectory passes the starting g_N.
inline TrapReport growth_trap_experiment(const ModelParams& p,
                                         const std::vector<double>& starts,
                                         const std::vector<double>& s_values,
                                         const ShootingConfig& base_cfg = ShootingConfig{}) {
    TrapReport rep;
    rep.starts = starts;
    rep.s_values = s_values;
    const double g_star = bgp_decentralized(p).g_star;

    for (double s : s_values) {
        ModelParams ps = p;
        ps.s = s;
        ShootingConfig cfg = base_cfg;
        cfg.target_g_N = 0.0; // full path, cut per start below
        Trajectory traj = solve_transition(ps, cfg, std::isfinite(s));
        // arrival index: first sample within the 1% band of g*
        size_t i_arr = traj.samples.size();
        for (size_t i = 0; i < traj.samples.size(); ++i) {
            if (std::abs(traj.samples[i].g_N - g_star) <= 0.01 * g_star) {
                i_arr = i;
                break;
            }
        }
        for (double start : starts) {
            TrapCell cell;
            cell.start_g_N = start;
            cell.s = s;
            size_t i0 = traj.samples.size();
            for (size_t i = 0; i < traj.samples.size(); ++i) {
                if (traj.samples[i].g_N >= start) {
                    i0 = i;
                    break;
                }
            }
            if (traj.converged && i0 < traj.samples.size() && i_arr < traj.samples.size() &&
                i_arr >= i0) {
                cell.arrival_time = (double)(i_arr - i0) * base_cfg.dt;
                cell.converged = true;
            }
            rep.cells.push_back(cell);
        }
    }

    // reorder into starts x s_values layout
    {
        std::vector<TrapCell> ordered(rep.cells.size());
        const size_t ns = s_values.size();
        for (size_t j = 0; j < ns; ++j)
            for (size_t i = 0; i < starts.size(); ++i)
                ordered[i * ns + j] = rep.cells[j * starts.size() + i];
        rep.cells = std::move(ordered);
    }

    if (starts.size() >= 2 && !s_values.empty()) {
        // lagging = smallest start, leading = largest start
        size_t lag = 0, lead = 0;
        for (size_t i = 1; i < starts.size(); ++i) {
            if (starts[i] < starts[lag]) lag = i;
            if (starts[i] > starts[lead]) lead = i;
        }
        auto idx_of = [&](double sv) -> int {
            for (size_t j = 0; j < s_values.size(); ++j)
                if (s_values[j] == sv || (!std::isfinite(s_values[j]) && !std::isfinite(sv)))
                    return (int)j;
            return -1;
        };
        const int j0 = idx_of(0.0);
        int jinf = -1;
        for (size_t j = 0; j < s_values.size(); ++j)
            if (!std::isfinite(s_values[j])) jinf = (int)j;

        if (j0 >= 0) rep.delay_at_s0 = rep.arrival(lag, j0) - rep.arrival(lead, j0);
        if (j0 >= 0 && jinf >= 0) {
            rep.partial_catch_up = rep.arrival(lag, (size_t)jinf) < rep.arrival(lag, (size_t)j0) &&
                                   rep.arrival(lag, (size_t)jinf) > rep.arrival(lead, (size_t)jinf);
            // middle tightness values must land strictly inside the extremes
            rep.strictly_between = true;
            bool any_middle = false;
            for (size_t j = 0; j < s_values.size(); ++j) {
                if ((int)j == j0 || (int)j == jinf) continue;
                any_middle = true;
                const double a = rep.arrival(lag, j);
                if (!(a < rep.arrival(lag, (size_t)j0) && a > rep.arrival(lag, (size_t)jinf)))
                    rep.strictly_between = false;
            }
            if (!any_middle) rep.strictly_between = false;
        }
    }
    return rep;
}

} // namespace growthlab
