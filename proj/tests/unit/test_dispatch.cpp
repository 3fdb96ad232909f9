#include "heatplan/dispatch/day_model.hpp"
#include "heatplan/dispatch/economics.hpp"
#include "heatplan/dispatch/evaluate.hpp"
#include "support/dispatch_fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace heatplan::dispatch;
using heatplan::testing::chp_boiler_grid_oracle;
using heatplan::testing::chp_boiler_instance;

namespace {

ThermalGenerator thermal(double c1, double c2, double c3, double p_min, double p_max, double ramp) {
    ThermalGenerator g;
    g.name = "g";
    g.cost = {c1, c2, c3};
    g.p_min = p_min;
    g.p_max = p_max;
    g.ramp = ramp;
    return g;
}

TypicalDay flat_day(std::size_t T, double load, double heat, double wind, double pv) {
    TypicalDay d;
    d.electric_load.assign(T, load);
    d.heat_load.assign(T, heat);
    d.wind_max.assign(T, wind);
    d.pv_max.assign(T, pv);
    return d;
}

// Two generators, every heat-source slot, and a shaped 24 h day.
SystemConfig mixed_system() {
    SystemConfig cfg;
    cfg.thermal.push_back(thermal(2.44, 35.64, 11.54, 5.0, 60.0, 20.0));
    ChpGenerator chp;
    chp.name = "chp";
    chp.cost = {1.03, 32.74, 14.62, 0.58, 22.56, 0.15};
    chp.c_vcd = 0.045;
    chp.c_m = 0.75;
    chp.c_cab = 0.15;
    chp.p_min = 10.0;
    chp.p_max = 60.0;
    chp.h_max = 60.0;
    chp.ramp = 25.0;
    cfg.chp.push_back(chp);
    cfg.network = {0.02, 1, 10.0, 40.0};
    cfg.wind_capacity = 50.0;
    cfg.pv_capacity = 20.0;
    cfg.limits = {{30.0}, {8.0}, {120.0}, {80.0}};
    return cfg;
}

TypicalDay shaped_day() {
    TypicalDay d;
    for (int t = 0; t < 24; ++t) {
        const double phase = 2.0 * M_PI * t / 24.0;
        d.electric_load.push_back(70.0 + 15.0 * std::sin(phase - 1.2));
        d.heat_load.push_back(40.0 + 12.0 * std::cos(phase));
        d.wind_max.push_back(25.0 + 20.0 * std::sin(3.0 * phase + 0.4));
        d.pv_max.push_back(t >= 7 && t <= 17 ? 18.0 * std::sin(M_PI * (t - 6) / 12.0) : 0.0);
    }
    d.weight = 31.0;
    return d;
}

}  // namespace

TEST_CASE("capital recovery factor") {
    CHECK(capital_recovery(0.05, 1) == doctest::Approx(1.05).epsilon(1e-15));
    CHECK(std::abs(capital_recovery(0.05, 25) - 0.0709525) <= 1e-6);
    CHECK(capital_recovery(0.05, 15) > capital_recovery(0.05, 25));
    for (int life = 1; life < 60; ++life) CHECK(capital_recovery(0.07, life + 1) < capital_recovery(0.07, life));
    CHECK_THROWS_AS((void)capital_recovery(0.0, 10), std::domain_error);
    CHECK_THROWS_AS((void)capital_recovery(-0.01, 10), std::domain_error);
    CHECK_THROWS_AS((void)capital_recovery(0.05, 0), std::domain_error);
}

TEST_CASE("investment cost is linear and matches the hand example") {
    SystemConfig cfg;
    cfg.limits = {{50.0}, {10.0}, {100.0}, {100.0}};
    auto scheme = CapacityScheme::zero(cfg);
    CHECK(investment_cost(scheme, cfg) == 0.0);
    scheme.eb_rated = {10.0};
    CHECK(std::abs(investment_cost(scheme, cfg) - 272857.5) <= 1.0);
    scheme = {{7.0}, {3.0}, {40.0}, {25.0}};
    const double base = investment_cost(scheme, cfg);
    const CapacityScheme twice{{14.0}, {6.0}, {80.0}, {50.0}};
    CHECK(investment_cost(twice, cfg) == doctest::Approx(2.0 * base).epsilon(1e-12));
    // Additivity across kinds.
    double parts = 0.0;
    for (int k = 0; k < 4; ++k) {
        auto only = CapacityScheme::zero(cfg);
        if (k == 0) only.eb_rated = scheme.eb_rated;
        if (k == 1) only.pump_rated = scheme.pump_rated;
        if (k == 2) only.tes_capacity = scheme.tes_capacity;
        if (k == 3) only.csh_capacity = scheme.csh_capacity;
        parts += investment_cost(only, cfg);
    }
    CHECK(parts == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("one generator without heat units: 24 variables, 24 balance rows") {
    SystemConfig cfg;
    cfg.thermal.push_back(thermal(0.1, 10.0, 0.0, 0.0, 100.0, 100.0));
    const auto day = flat_day(24, 50.0, 0.0, 0.0, 0.0);
    const auto prob = build_day_problem(cfg, CapacityScheme::zero(cfg), day);
    CHECK(prob.layout.num_vars == 24);
    CHECK(prob.qp.num_vars() == 24);
    CHECK(prob.qp.num_eq() == 24);
}

TEST_CASE("empty system dispatches to zero") {
    SystemConfig cfg;
    cfg.thermal.push_back(thermal(0.5, 3.0, 0.0, 0.0, 10.0, 10.0));
    const auto r = simulate_day(cfg, CapacityScheme::zero(cfg), flat_day(24, 0.0, 0.0, 0.0, 0.0));
    REQUIRE(r.feasible);
    CHECK(std::abs(r.day_cost) <= 1e-9);
    CHECK(r.schedule.p_thermal.cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(r.day_res == 0.0);
}

TEST_CASE("boiler output inverts its efficiency") {
    SystemConfig cfg;
    cfg.thermal.push_back(thermal(0.0, 20.0, 0.0, 0.0, 10.0, 10.0));
    cfg.network = {0.0, 0, 0.0, 0.0};
    cfg.limits.eb_rated = {5.0};
    CapacityScheme scheme{{5.0}, {}, {}, {}};
    const auto r = simulate_day(cfg, scheme, flat_day(24, 0.0, 0.95, 0.0, 0.0));
    REQUIRE(r.feasible);
    for (int t = 0; t < 24; ++t) CHECK(r.schedule.p_eb(0, t) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.day_cost == doctest::Approx(24.0 * (20.0 + cfg.eb_operating_price)).epsilon(1e-6));
}

TEST_CASE("CHP operating region") {
    const auto in = chp_boiler_instance();
    const auto& chp = in.cfg.chp.front();
    TypicalDay day = flat_day(1, 0.0, 0.0, 0.0, 0.0);
    auto schedule_at = [&](double p, double h) {
        DaySchedule s;
        s.p_chp = Eigen::MatrixXd::Constant(1, 1, p);
        s.h_chp = Eigen::MatrixXd::Constant(1, 1, h);
        s.p_eb = Eigen::MatrixXd::Zero(1, 1);
        s.h_eb = Eigen::MatrixXd::Zero(1, 1);
        s.p_wind = Eigen::VectorXd::Zero(1);
        s.p_pv = Eigen::VectorXd::Zero(1);
        return s;
    };
    const auto scheme = CapacityScheme::zero(in.cfg);
    CHECK(check_residuals(in.cfg, scheme, day, schedule_at(chp.p_min, 0.0)).chp_region == 0.0);
    const double eps = 1e-3;
    const double p_bad = chp.p_min - chp.c_vcd * chp.h_max - eps;
    CHECK(check_residuals(in.cfg, scheme, day, schedule_at(p_bad, chp.h_max)).chp_region > 0.0);
    // Corners of the region from the three lines.
    CHECK(check_residuals(in.cfg, scheme, day, schedule_at(chp.p_max, 0.0)).chp_region == 0.0);
    CHECK(check_residuals(in.cfg, scheme, day, schedule_at(chp.p_max + eps, 0.0)).chp_region > 0.0);
    CHECK(check_residuals(in.cfg, scheme, day, schedule_at(20.0, 20.0)).chp_region > 0.0);  // below back-pressure line
    CHECK(check_residuals(in.cfg, scheme, day, schedule_at(30.0, 20.0)).chp_region == 0.0);
}

TEST_CASE("storage and network rows are cyclic") {
    const auto cfg = mixed_system();
    const CapacityScheme scheme{{10.0}, {4.0}, {80.0}, {40.0}};
    const auto prob = build_day_problem(cfg, scheme, shaped_day());
    const auto& L = prob.layout;
    const int T = L.horizon;
    auto has_cyclic_row = [&](int base) {
        const Eigen::MatrixXd A(prob.qp.A_eq);
        for (int r = 0; r < A.rows(); ++r) {
            if (A(r, L.state(base, 0, 0)) == 1.0 && A(r, L.state(base, 0, T)) == -1.0 && A.row(r).cwiseAbs().sum() == 2.0)
                return true;
        }
        return false;
    };
    CHECK(has_cyclic_row(L.tes_q));
    CHECK(has_cyclic_row(L.csh_q));
    CHECK(has_cyclic_row(L.e_net));

    const auto r = simulate_day(cfg, scheme, shaped_day());
    REQUIRE(r.feasible);
    CHECK(r.schedule.tes_q(0, 0) == doctest::Approx(r.schedule.tes_q(0, T)).epsilon(1e-6));
    CHECK(r.schedule.e_net(0) == doctest::Approx(r.schedule.e_net(T)).epsilon(1e-6));
}

TEST_CASE("mixed system solves with small residuals") {
    const auto cfg = mixed_system();
    const auto day = shaped_day();
    double peak = 0.0;
    for (double v : day.electric_load) peak = std::max(peak, v);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const CapacityScheme scheme{{30.0 * u(rng)}, {8.0 * u(rng)}, {120.0 * u(rng)}, {80.0 * u(rng)}};
        const auto r = simulate_day(cfg, scheme, day);
        REQUIRE(r.feasible);
        const auto res = check_residuals(cfg, scheme, day, r.schedule);
        INFO("trial " << trial << " pb " << res.power_balance << " heat " << res.heat_network << " storage "
                      << res.storage << " region " << res.chp_region);
        CHECK(res.power_balance <= 1e-6 * peak);
        CHECK(res.max() <= 1e-6 * peak);
        CHECK(res.chp_region <= 1e-6);
        CHECK(res.storage <= 1e-6);
        CHECK(res.network_bounds <= 1e-6);
        CHECK(r.day_res <= [&] {
            double s = 0.0;
            for (int t = 0; t < 24; ++t) s += std::min(day.wind_max[t], cfg.wind_capacity) + std::min(day.pv_max[t], cfg.pv_capacity);
            return s;
        }() + 1e-6);
        CHECK(r.weighted_cost == doctest::Approx(31.0 * r.day_cost));
    }
}

TEST_CASE("capacity pre-check rejects impossible heat load") {
    const auto cfg = mixed_system();
    auto day = shaped_day();
    for (auto& h : day.heat_load) h = 500.0;
    const auto scheme = CapacityScheme::zero(cfg);
    CHECK_THROWS_AS((void)build_day_problem(cfg, scheme, day), StructurallyInfeasible);
    const auto r = simulate_day(cfg, scheme, day);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.message.empty());

    auto low = shaped_day();
    for (auto& e : low.electric_load) e = 1.0;  // below must-run output, no flexible demand
    CHECK_THROWS_AS((void)build_day_problem(cfg, scheme, low), StructurallyInfeasible);
}

TEST_CASE("CHP + boiler dispatch agrees with grid enumeration") {
    const auto in = chp_boiler_instance();
    const double oracle = chp_boiler_grid_oracle(in, 0.5);
    REQUIRE(std::isfinite(oracle));
    const auto r = simulate_day(in.cfg, in.scheme, in.day);
    REQUIRE(r.feasible);
    CHECK(r.day_cost <= oracle + 1e-6);
    CHECK(std::abs(r.day_cost - oracle) <= 0.005 * oracle);
    const auto res = check_residuals(in.cfg, in.scheme, in.day, r.schedule);
    CHECK(res.max() <= 1e-6);
    // Finer grid closes the gap from above.
    const double fine = chp_boiler_grid_oracle(in, 0.25);
    CHECK(fine <= oracle + 1e-9);
    CHECK(r.day_cost <= fine + 1e-6);
}

TEST_CASE("enlarging a capacity never raises the generation cost") {
    auto cfg = mixed_system();
    cfg.tie_break = 0.0;
    const auto day = shaped_day();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tol = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        CapacityScheme small{{20.0 * u(rng)}, {6.0 * u(rng)}, {90.0 * u(rng)}, {60.0 * u(rng)}};
        CapacityScheme big = small;
        switch (trial % 4) {
            case 0: big.eb_rated[0] += 10.0 * u(rng); break;
            case 1: big.pump_rated[0] += 2.0 * u(rng); break;
            case 2: big.tes_capacity[0] += 30.0 * u(rng); break;
            default: big.csh_capacity[0] += 20.0 * u(rng); break;
        }
        const auto a = simulate_day(cfg, small, day);
        const auto b = simulate_day(cfg, big, day);
        REQUIRE(a.feasible);
        REQUIRE(b.feasible);
        INFO("trial " << trial << " small " << a.day_cost << " big " << b.day_cost);
        CHECK(b.day_cost <= a.day_cost + tol * a.day_cost);
    }
}

TEST_CASE("scheme validation") {
    const auto cfg = mixed_system();
    CHECK_NOTHROW(cfg.validate());
    CapacityScheme bad{{40.0}, {0.0}, {0.0}, {0.0}};
    CHECK_THROWS_AS(bad.validate(cfg), std::invalid_argument);
    CapacityScheme neg{{-1.0}, {0.0}, {0.0}, {0.0}};
    CHECK_THROWS_AS(neg.validate(cfg), std::invalid_argument);
    CapacityScheme size{{1.0, 1.0}, {0.0}, {0.0}, {0.0}};
    CHECK_THROWS_AS(size.validate(cfg), std::invalid_argument);
    auto broken = cfg;
    broken.interest_rate = 0.0;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("evaluation weights days and adds investment") {
    const auto cfg = mixed_system();
    const CapacityScheme scheme{{12.0}, {3.0}, {50.0}, {20.0}};
    auto day = shaped_day();
    day.weight = 1.0;
    const auto single = simulate_day(cfg, scheme, day);
    REQUIRE(single.feasible);

    auto d30 = day;
    d30.weight = 30.0;
    const auto ev30 = evaluate_scheme(cfg, scheme, {d30});
    CHECK(ev30.generation == doctest::Approx(30.0 * single.day_cost).epsilon(1e-9));
    CHECK(ev30.objectives.annual_cost == doctest::Approx(investment_cost(scheme, cfg) + 30.0 * single.day_cost).epsilon(1e-9));
    CHECK(ev30.objectives.neg_res_consumed == doctest::Approx(-30.0 * single.day_res).epsilon(1e-9));
    CHECK(ev30.objectives.neg_res_consumed <= 0.0);
    CHECK(ev30.objectives.annual_cost >= investment_cost(scheme, cfg));

    auto d10 = day, d20 = day;
    d10.weight = 10.0;
    d20.weight = 20.0;
    const auto split = evaluate_scheme(cfg, scheme, {d10, d20});
    CHECK(split.objectives.annual_cost == doctest::Approx(ev30.objectives.annual_cost).epsilon(1e-9));
    CHECK(split.objectives.neg_res_consumed == doctest::Approx(ev30.objectives.neg_res_consumed).epsilon(1e-9));
    CHECK_FALSE(split.penalized());
    CHECK_THROWS_AS((void)evaluate_scheme(cfg, scheme, {}), std::invalid_argument);
}

TEST_CASE("infeasible days are penalized at ten times the largest feasible cost") {
    const auto cfg = mixed_system();
    const auto scheme = CapacityScheme::zero(cfg);
    auto good = shaped_day();
    good.weight = 2.0;
    auto bad = shaped_day();
    for (auto& h : bad.heat_load) h = 500.0;
    bad.weight = 3.0;
    PenaltyPolicy policy;
    const auto ev = evaluate_scheme(cfg, scheme, {good, bad}, &policy);
    REQUIRE(ev.infeasible_days == 1);
    const double good_cost = ev.days[0].day_cost;
    CHECK(ev.days[1].day_cost == doctest::Approx(10.0 * good_cost));
    CHECK(ev.days[1].day_res == 0.0);
    CHECK(ev.generation == doctest::Approx(2.0 * good_cost + 3.0 * 10.0 * good_cost));
    CHECK(ev.objectives.neg_res_consumed == doctest::Approx(-2.0 * ev.days[0].day_res));
    REQUIRE(policy.largest_feasible().has_value());

    // Without any feasible reference the penalty is finite and positive.
    PenaltyPolicy fresh;
    const auto only_bad = evaluate_scheme(cfg, scheme, {bad}, &fresh);
    CHECK(std::isfinite(only_bad.objectives.annual_cost));
    CHECK(only_bad.objectives.annual_cost > 0.0);
}

TEST_CASE("negative RES availability reads as none") {
    const auto cfg = mixed_system();
    auto day = shaped_day();
    auto clipped = day;
    for (std::size_t t = 0; t < 24; ++t) {
        if (day.pv_max[t] == 0.0) day.pv_max[t] = -0.4;
        if (t % 5 == 0) {
            day.wind_max[t] = -3.0;
            clipped.wind_max[t] = 0.0;
        }
    }
    const CapacityScheme scheme{{10.0}, {4.0}, {60.0}, {40.0}};
    const auto a = simulate_day(cfg, scheme, day);
    const auto b = simulate_day(cfg, scheme, clipped);
    REQUIRE(a.feasible);
    REQUIRE(b.feasible);
    CHECK(a.day_cost == doctest::Approx(b.day_cost).epsilon(1e-9));
    CHECK(a.day_res == doctest::Approx(b.day_res).epsilon(1e-9));
    auto bad = shaped_day();
    bad.heat_load[3] = -1.0;
    CHECK_THROWS((void)simulate_day(cfg, scheme, bad));
}
