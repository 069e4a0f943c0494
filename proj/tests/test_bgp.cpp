#include <catch_amalgamated.hpp>

#include <cmath>

#include "growthlab/bgp.hpp"

using namespace growthlab;

// Hand-reduced fractions of the closed forms at the default parameter
// rationals (n=1/50, rho=3/100, gamma=5/2, sigma=3/2, xi=1/2, zeta=17/20):
// the growth denominator is (1-zeta)sigma - xi(1-gamma) = 39/40, so
// g* = (3/2)(1/50)/(39/40) = 2/65 and so on down the chain.
namespace oracle {
constexpr double g_star = 2.0 / 65.0;
constexpr double g_phi_star = -2.0 / 65.0;
constexpr double g_mu_star = -1.0 / 13.0;
constexpr double r_star = 139.0 / 1300.0;
constexpr double theta_d = 16.95;
constexpr double s_d = 20.0 / 359.0;
constexpr double theta_s = 3.95;
constexpr double s_s = 20.0 / 99.0;
constexpr double overuse = 359.0 / 99.0;
constexpr double planner_bound = 7.0 / 30.0;
constexpr double jones = 2.0 / 15.0;
} // namespace oracle

TEST_CASE("decentralized BGP rates at the default calibration") {
    const BgpSolution b = bgp_decentralized(ModelParams{});
    CHECK(b.g_star == Catch::Approx(oracle::g_star).margin(1e-12));
    CHECK(b.g_phi_star == Catch::Approx(oracle::g_phi_star).margin(1e-12));
    CHECK(b.g_mu_star == Catch::Approx(oracle::g_mu_star).margin(1e-12));
    CHECK(b.r_star == Catch::Approx(oracle::r_star).margin(1e-12));
    CHECK(b.regime == Regime::DecentralizedConsumerOwned);
    CHECK(b.feasible);

    // the common rate exceeds population growth, data provision shrinks
    CHECK(b.g_star > ModelParams{}.n);
    CHECK(b.g_phi_star < 0.0);
    // free-entry identity: (zeta-1) g* + xi g_phi* + n = 0
    ModelParams p;
    CHECK((p.zeta - 1.0) * b.g_star + p.xi * b.g_phi_star + p.n ==
          Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("planner BGP shares rates with the decentralized path") {
    const BgpSolution s = bgp_planner(ModelParams{});
    CHECK(s.g_star == Catch::Approx(oracle::g_star).margin(1e-12));
    CHECK(s.g_phi_star == Catch::Approx(oracle::g_phi_star).margin(1e-12));
    CHECK(s.regime == Regime::Planner);
    CHECK(s.planner_bound == Catch::Approx(oracle::planner_bound).margin(1e-12));
    // the upper limit can only bind for gamma < 1
    CHECK_FALSE(s.constraint_binding);
}

TEST_CASE("labor shares and the Theta terms at the defaults") {
    const LaborShares d = labor_share_decentralized(ModelParams{});
    CHECK(d.theta_aux == Catch::Approx(oracle::theta_d).margin(1e-12));
    CHECK(d.s_rd == Catch::Approx(oracle::s_d).margin(1e-12));

    const LaborShares s = labor_share_planner(ModelParams{});
    CHECK(s.theta_aux == Catch::Approx(oracle::theta_s).margin(1e-12));
    CHECK(s.s_rd == Catch::Approx(oracle::s_s).margin(1e-12));
    CHECK(s.valid);

    // the planner staffs R&D far more heavily
    CHECK(s.s_rd > d.s_rd);
}

TEST_CASE("zero population growth collapses the R&D share to zero") {
    ModelParams p;
    p.n = 0.0;
    const LaborShares d = labor_share_decentralized(p);
    CHECK(d.s_rd == 0.0);
    CHECK(std::isinf(d.theta_aux));
    const LaborShares s = labor_share_planner(p);
    CHECK(s.s_rd == 0.0);
}

TEST_CASE("log utility limit turns off the data channel in g*") {
    ModelParams p;
    p.gamma = 1.0;
    // at gamma = 1 the closed form reduces to n/(1-zeta) exactly
    CHECK(bgp_decentralized(p).g_star == Catch::Approx(oracle::jones).margin(1e-15));
    p.gamma = 1.0 + 1e-6;
    CHECK(std::abs(bgp_decentralized(p).g_star - oracle::jones) < 1e-6);
}

TEST_CASE("growth denominator violations throw") {
    ModelParams p;
    p.gamma = 0.5;
    p.zeta = 0.9; // (1-zeta)sigma - xi(1-gamma) = 0.15 - 0.25 < 0
    CHECK_THROWS_AS(bgp_decentralized(p), std::domain_error);
    p = ModelParams{};
    p.sigma = 0.4; // sigma < xi breaks the planner algebra
    CHECK_THROWS_AS(bgp_planner(p), std::domain_error);
}

TEST_CASE("data overuse ratio at the defaults is between three and six") {
    const double r = data_overuse_ratio(ModelParams{});
    CHECK(r == Catch::Approx(oracle::overuse).margin(1e-12));
    CHECK(r > 3.0);
    CHECK(r < 6.0);
}

TEST_CASE("labor income share is inversely proportional to l_R") {
    ModelParams p;
    CHECK(labor_income_share(p, 1.0) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(labor_income_share(p, 0.5) == Catch::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(labor_income_share(p, 0.0), std::domain_error);
    CHECK_THROWS_AS(labor_income_share(p, 1.5), std::domain_error);
}

TEST_CASE("misallocation grid covers the region and always favors the planner") {
    const auto cells = misallocation_grid(ModelParams{}, GridRanges{});
    // 11 xi values x 10 zeta values x 2 sigmas
    REQUIRE(cells.size() == 220);

    int feasible = 0;
    for (const auto& c : cells) {
        if (!c.feasible) continue;
        ++feasible;
        CHECK(c.s_rd_planner > c.s_rd_decentralized);
        CHECK(c.gap > 0.0);
        CHECK(c.overuse_ratio > 1.0);
    }
    // with gamma = 2.5 the whole region satisfies the existence condition
    CHECK(feasible == 220);
}

TEST_CASE("share gap at the baseline cell widens with sigma") {
    const auto cells = misallocation_grid(ModelParams{}, GridRanges{});
    double gap15 = 0.0, gap25 = 0.0;
    for (const auto& c : cells) {
        if (std::abs(c.xi - 0.5) < 1e-9 && std::abs(c.zeta - 0.85) < 1e-9) {
            if (c.sigma == 1.5) gap15 = c.gap;
            if (c.sigma == 2.5) gap25 = c.gap;
        }
    }
    CHECK(gap15 == Catch::Approx(oracle::s_s - oracle::s_d).margin(1e-12));
    CHECK(gap25 > gap15);
    // 1/4.75 - 1/17.35 with the sigma = 2.5 Theta values 3.75 and 16.35
    CHECK(gap25 == Catch::Approx(1.0 / 4.75 - 1.0 / 17.35).margin(1e-12));
}

TEST_CASE("firm ownership produces the high-growth branch at the baseline") {
    ModelParams p; // xi=0.5, zeta=0.85, n=0.02, phi_cost=4
    const BgpSolution b = bgp_firm_ownership(p);
    CHECK(b.regime == Regime::FirmOwned);
    CHECK(b.feasible);
    CHECK(b.g_star == Catch::Approx(0.9).margin(1e-12));
    CHECK(b.g_phi_star == Catch::Approx(0.23).margin(1e-12));
    CHECK(b.g_star > b.g_phi_star);
    CHECK(std::isnan(b.g_mu_star));
}

TEST_CASE("firm ownership switches to the capped branch for cheap processing") {
    ModelParams p;
    p.xi = 0.1;
    p.phi_cost = 1.01; // 2 - zeta = 1.15 > xi + phi_cost = 1.11
    const BgpSolution b = bgp_firm_ownership(p);
    CHECK(b.regime == Regime::FirmOwnedConstrained);
    CHECK(b.g_star == Catch::Approx(0.02 / 0.05).margin(1e-12));
    CHECK(b.g_phi_star == Catch::Approx(b.g_star).margin(1e-15));
}

TEST_CASE("firm ownership reports infeasible spillover configurations") {
    ModelParams p;
    p.zeta = 0.9;
    p.phi_cost = 4.0;
    p.xi = 0.5; // phi_cost (1-zeta) = 0.4 < xi
    const BgpSolution b = bgp_firm_ownership(p);
    CHECK_FALSE(b.feasible);
    CHECK(b.infeasible_reason == "phi_cost*(1-zeta) <= xi");
}

TEST_CASE("consumer constraint is slack above the binding threshold") {
    ModelParams p;
    p.s = 0.0; // threshold at the defaults is g_phi* - g* = -4/65
    const BgpSolution b = bgp_consumer_constrained(p);
    CHECK(b.regime == Regime::ConsumerOwnedConstrained);
    CHECK_FALSE(b.constraint_binding);
    CHECK(b.g_star == Catch::Approx(oracle::g_star).margin(1e-12));
    CHECK(b.g_phi_star == Catch::Approx(oracle::g_phi_star).margin(1e-12));
}

TEST_CASE("binding consumer constraint on a feasible configuration") {
    ModelParams p;
    p.zeta = 0.4;
    p.xi = 0.3;
    // baseline: g* = -g_phi* = 0.03/1.35, threshold = -2 g* = -0.0444...
    p.s = -0.05;
    const BgpSolution b = bgp_consumer_constrained(p);
    CHECK(b.constraint_binding);
    CHECK(b.feasible);
    CHECK(b.g_star == Catch::Approx((0.3 * -0.05 + 0.02) / 0.3).margin(1e-12));
    CHECK(b.g_phi_star == Catch::Approx(b.g_star + p.s).margin(1e-15));
    CHECK(b.r_star == Catch::Approx(p.gamma * b.g_star + p.rho).margin(1e-15));
}

TEST_CASE("binding consumer constraint at the defaults is infeasible") {
    ModelParams p;
    p.s = -0.08; // deep enough to bind; 1 - zeta - xi = -0.35 at the defaults
    const BgpSolution b = bgp_consumer_constrained(p);
    CHECK(b.constraint_binding);
    CHECK_FALSE(b.feasible);
    CHECK(b.infeasible_reason == "1-zeta-xi <= 0");
}
