#include "heatplan/dispatch/day_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

namespace heatplan::dispatch {

namespace {

using solver::kInfinity;
using Terms = std::vector<std::pair<int, double>>;

class RowBuilder {
public:
    void equality(const Terms& terms, double rhs) {
        add(eq_, terms);
        b_eq_.push_back(rhs);
    }
    void inequality(const Terms& terms, double lo, double hi) {
        add(in_, terms);
        l_in_.push_back(lo);
        u_in_.push_back(hi);
    }

    void finish(solver::QuadraticProgram& qp, int n) const {
        qp.A_eq.resize(static_cast<Eigen::Index>(b_eq_.size()), n);
        qp.A_eq.setFromTriplets(eq_.entries.begin(), eq_.entries.end());
        qp.b_eq = Eigen::Map<const Eigen::VectorXd>(b_eq_.data(), static_cast<Eigen::Index>(b_eq_.size()));
        qp.A_in.resize(static_cast<Eigen::Index>(l_in_.size()), n);
        qp.A_in.setFromTriplets(in_.entries.begin(), in_.entries.end());
        qp.l_in = Eigen::Map<const Eigen::VectorXd>(l_in_.data(), static_cast<Eigen::Index>(l_in_.size()));
        qp.u_in = Eigen::Map<const Eigen::VectorXd>(u_in_.data(), static_cast<Eigen::Index>(u_in_.size()));
    }

private:
    struct Block {
        std::vector<solver::Triplet> entries;
        int rows{0};
    };
    static void add(Block& b, const Terms& terms) {
        for (const auto& [col, v] : terms)
            if (v != 0.0) b.entries.emplace_back(b.rows, col, v);
        ++b.rows;
    }
    Block eq_, in_;
    std::vector<double> b_eq_, l_in_, u_in_;
};

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

/// Largest heat output a CHP unit can reach inside its operating region.
double chp_heat_capacity(const ChpGenerator& c) {
    double h = c.h_max;
    if (c.c_m + c.c_cab > 0.0) h = std::min(h, (c.p_max - c.intercept()) / (c.c_m + c.c_cab));
    if (c.c_cab > 0.0) h = std::min(h, (c.p_max - c.p_min) / c.c_cab);
    return std::max(0.0, h);
}

// Moment-matched profiles can dip below zero at night; that reads as nothing available.
double wind_available(const SystemConfig& cfg, const TypicalDay& day, int t) {
    return std::clamp(day.wind_max[static_cast<std::size_t>(t)], 0.0, cfg.wind_capacity);
}
double pv_available(const SystemConfig& cfg, const TypicalDay& day, int t) {
    return std::clamp(day.pv_max[static_cast<std::size_t>(t)], 0.0, cfg.pv_capacity);
}

void capacity_precheck(const SystemConfig& cfg, const CapacityScheme& scheme, const TypicalDay& day,
                       const DayLayout& L) {
    const int T = L.horizon;
    double p_max = 0.0, p_min = 0.0;
    for (const auto& g : cfg.thermal) {
        p_max += g.p_max;
        p_min += g.p_min;
    }
    for (const auto& c : cfg.chp) {
        p_max += c.p_max;
        p_min += c.p_min;
    }
    double flexible = sum(scheme.eb_rated) + sum(scheme.pump_rated);
    for (double s : scheme.csh_capacity)
        flexible += s * cfg.csh.storage.charge_rate / cfg.csh.conversion +
                    cfg.csh.storage.aux_power * s * (cfg.csh.storage.charge_rate + cfg.csh.storage.discharge_rate);
    for (double s : scheme.tes_capacity)
        flexible += cfg.tes.aux_power * s * (cfg.tes.charge_rate + cfg.tes.discharge_rate);

    double heat_rate = 0.0;
    for (const auto& c : cfg.chp) heat_rate += chp_heat_capacity(c);
    for (double p : scheme.eb_rated) heat_rate += cfg.boiler.efficiency * p;
    for (double p : scheme.pump_rated) heat_rate += cfg.pump.cop * p;
    double discharge = 0.0;
    for (double s : scheme.tes_capacity) discharge += cfg.tes.discharge_rate * s;
    for (double s : scheme.csh_capacity) discharge += cfg.csh.storage.discharge_rate * s;
    const double delivered = 1.0 - cfg.network.loss;

    std::ostringstream why;
    for (int t = 0; t < T; ++t) {
        const double load = day.electric_load[static_cast<std::size_t>(t)];
        const double res = (L.has_wind ? wind_available(cfg, day, t) : 0.0) + (L.has_pv ? pv_available(cfg, day, t) : 0.0);
        if (load > p_max + res + 1e-9) {
            why << "electric load " << load << " MW at step " << t << " exceeds total generation capacity "
                << p_max + res << " MW";
            throw StructurallyInfeasible(why.str());
        }
        if (p_min > load + flexible + 1e-9) {
            why << "minimum generation " << p_min << " MW at step " << t << " exceeds load plus flexible demand "
                << load + flexible << " MW";
            throw StructurallyInfeasible(why.str());
        }
    }
    const double heat_total = sum(day.heat_load);
    if (!L.has_heat) {
        if (heat_total > 0.0) throw StructurallyInfeasible("heat load present but the system has no heat source");
        return;
    }
    if (heat_total > delivered * T * heat_rate + 1e-9) {
        why << "daily heat load " << heat_total << " MWh exceeds deliverable heat " << delivered * T * heat_rate
            << " MWh";
        throw StructurallyInfeasible(why.str());
    }
    const double buffer = cfg.network.e_max - cfg.network.e_min;
    for (int t = 0; t < T; ++t) {
        const double h = day.heat_load[static_cast<std::size_t>(t)];
        if (h > delivered * (heat_rate + discharge) + buffer + 1e-9) {
            why << "heat load " << h << " MW at step " << t << " exceeds deliverable heat plus network buffer";
            throw StructurallyInfeasible(why.str());
        }
    }
}

DayLayout make_layout(const SystemConfig& cfg, const TypicalDay& day) {
    DayLayout L;
    const int T = static_cast<int>(day.horizon());
    L.horizon = T;
    L.num_thermal = static_cast<int>(cfg.thermal.size());
    L.num_chp = static_cast<int>(cfg.chp.size());
    L.num_eb = static_cast<int>(cfg.num_eb());
    L.num_pump = static_cast<int>(cfg.num_pump());
    L.num_tes = static_cast<int>(cfg.num_tes());
    L.num_csh = static_cast<int>(cfg.num_csh());
    L.has_wind = cfg.wind_capacity > 0.0;
    L.has_pv = cfg.pv_capacity > 0.0;
    L.has_heat = L.num_chp + L.num_eb + L.num_pump + L.num_tes + L.num_csh > 0;

    int next = 0;
    auto block = [&](int units, int per) {
        const int base = next;
        next += units * per;
        return base;
    };
    L.p_thermal = block(L.num_thermal, T);
    L.p_chp = block(L.num_chp, T);
    L.h_chp = block(L.num_chp, T);
    if (L.has_wind) L.p_wind = block(1, T);
    if (L.has_pv) L.p_pv = block(1, T);
    L.p_eb = block(L.num_eb, T);
    L.h_eb = block(L.num_eb, T);
    L.p_pump = block(L.num_pump, T);
    L.h_pump = block(L.num_pump, T);
    L.tes_in = block(L.num_tes, T);
    L.tes_out = block(L.num_tes, T);
    L.tes_q = block(L.num_tes, T + 1);
    L.csh_p = block(L.num_csh, T);
    L.csh_in = block(L.num_csh, T);
    L.csh_out = block(L.num_csh, T);
    L.csh_q = block(L.num_csh, T + 1);
    if (L.has_heat) L.e_net = block(1, T + 1);
    L.num_vars = next;
    return L;
}

}  // namespace

DayProblem build_day_problem(const SystemConfig& cfg, const CapacityScheme& scheme, const TypicalDay& day) {
    day.validate();
    scheme.validate(cfg);
    DayProblem out;
    out.layout = make_layout(cfg, day);
    const DayLayout& L = out.layout;
    capacity_precheck(cfg, scheme, day, L);

    const int T = L.horizon;
    const int n = L.num_vars;
    const double w = day.weight;
    out.weight = w;

    std::vector<double> lo(static_cast<std::size_t>(n), 0.0), hi(static_cast<std::size_t>(n), kInfinity);
    auto bound = [&](int idx, double l, double h) {
        lo[static_cast<std::size_t>(idx)] = l;
        hi[static_cast<std::size_t>(idx)] = h;
    };
    // Variables fixed by an equality to a bounded one carry no bound row;
    // redundant active rows make the polish step degenerate.
    auto free = [&](int idx) { bound(idx, -kInfinity, kInfinity); };

    std::vector<solver::Triplet> q_entries;
    Eigen::VectorXd lin = Eigen::VectorXd::Zero(n);
    out.tie_break = Eigen::VectorXd::Zero(n);
    RowBuilder rows;

    // Generators: bounds, ramps, fuel cost.
    for (int g = 0; g < L.num_thermal; ++g) {
        const auto& gen = cfg.thermal[static_cast<std::size_t>(g)];
        for (int t = 0; t < T; ++t) {
            const int p = L.at(L.p_thermal, g, t);
            bound(p, gen.p_min, gen.p_max);
            q_entries.emplace_back(p, p, 2.0 * gen.cost[0] * w);
            lin(p) += gen.cost[1] * w;
            out.constant_cost += gen.cost[2] * w;
            if (t > 0 && gen.ramp < gen.p_max - gen.p_min)
                rows.inequality({{p, 1.0}, {L.at(L.p_thermal, g, t - 1), -1.0}}, -gen.ramp, gen.ramp);
        }
    }
    for (int c = 0; c < L.num_chp; ++c) {
        const auto& chp = cfg.chp[static_cast<std::size_t>(c)];
        for (int t = 0; t < T; ++t) {
            const int p = L.at(L.p_chp, c, t);
            const int h = L.at(L.h_chp, c, t);
            // P is bounded by the region rows only; a separate P_min bound would
            // cut off the extraction part of the region.
            free(p);
            bound(h, chp.h_min, chp.h_max);
            q_entries.emplace_back(p, p, 2.0 * chp.cost[0] * w);
            q_entries.emplace_back(h, h, 2.0 * chp.cost[3] * w);
            q_entries.emplace_back(p, h, chp.cost[5] * w);
            q_entries.emplace_back(h, p, chp.cost[5] * w);
            lin(p) += chp.cost[1] * w;
            lin(h) += chp.cost[4] * w;
            out.constant_cost += chp.cost[2] * w;
            // Operating region.
            rows.inequality({{p, 1.0}, {h, chp.c_vcd}}, chp.p_min, kInfinity);
            rows.inequality({{p, 1.0}, {h, -chp.c_m}}, chp.intercept(), kInfinity);
            rows.inequality({{p, 1.0}, {h, chp.c_cab}}, -kInfinity, chp.p_max);
            if (t > 0 && chp.ramp < chp.p_max - chp.p_min)
                rows.inequality({{p, 1.0}, {L.at(L.p_chp, c, t - 1), -1.0}}, -chp.ramp, chp.ramp);
        }
    }
    for (int t = 0; t < T; ++t) {
        if (L.has_wind) bound(L.at(L.p_wind, 0, t), 0.0, wind_available(cfg, day, t));
        if (L.has_pv) bound(L.at(L.p_pv, 0, t), 0.0, pv_available(cfg, day, t));
    }

    // Electric boilers and heat pumps.
    for (int k = 0; k < L.num_eb; ++k) {
        const double rated = scheme.eb_rated[static_cast<std::size_t>(k)];
        for (int t = 0; t < T; ++t) {
            const int p = L.at(L.p_eb, k, t);
            const int h = L.at(L.h_eb, k, t);
            bound(p, 0.0, rated);
            free(h);
            lin(p) += cfg.eb_operating_price * w;
            rows.equality({{h, 1.0}, {p, -cfg.boiler.efficiency}}, 0.0);
        }
    }
    for (int k = 0; k < L.num_pump; ++k) {
        const double rated = scheme.pump_rated[static_cast<std::size_t>(k)];
        for (int t = 0; t < T; ++t) {
            const int p = L.at(L.p_pump, k, t);
            const int h = L.at(L.h_pump, k, t);
            bound(p, 0.0, rated);
            free(h);
            out.tie_break(p) += cfg.tie_break * w;
            rows.equality({{h, 1.0}, {p, -cfg.pump.cop}}, 0.0);
        }
    }

    // Storage: Q_t = (1 - eta) Q_{t-1} + in_t - out_t, cyclic Q_0 = Q_T.
    auto storage = [&](const StorageSpec& spec, double capacity, int in_base, int out_base, int q_base, int unit) {
        for (int t = 0; t < T; ++t) {
            const int in = L.at(in_base, unit, t);
            const int o = L.at(out_base, unit, t);
            bound(in, 0.0, spec.charge_rate * capacity);
            bound(o, 0.0, spec.discharge_rate * capacity);
            out.tie_break(in) += cfg.tie_break * w;
            out.tie_break(o) += cfg.tie_break * w;
            rows.equality({{L.state(q_base, unit, t + 1), 1.0},
                           {L.state(q_base, unit, t), -(1.0 - spec.self_discharge)},
                           {in, -1.0},
                           {o, 1.0}},
                          0.0);
        }
        for (int t = 0; t <= T; ++t) bound(L.state(q_base, unit, t), 0.0, capacity);
        rows.equality({{L.state(q_base, unit, 0), 1.0}, {L.state(q_base, unit, T), -1.0}}, 0.0);
    };
    for (int k = 0; k < L.num_tes; ++k)
        storage(cfg.tes, scheme.tes_capacity[static_cast<std::size_t>(k)], L.tes_in, L.tes_out, L.tes_q, k);
    for (int k = 0; k < L.num_csh; ++k) {
        storage(cfg.csh.storage, scheme.csh_capacity[static_cast<std::size_t>(k)], L.csh_in, L.csh_out, L.csh_q, k);
        for (int t = 0; t < T; ++t) {
            const int p = L.at(L.csh_p, k, t);
            lin(p) += cfg.csh_operating_price * w;
            rows.equality({{L.at(L.csh_in, k, t), 1.0}, {p, -cfg.csh.conversion}}, 0.0);
            free(p);
        }
    }

    // Power balance.
    for (int t = 0; t < T; ++t) {
        Terms terms;
        for (int g = 0; g < L.num_thermal; ++g) terms.emplace_back(L.at(L.p_thermal, g, t), 1.0);
        for (int c = 0; c < L.num_chp; ++c) terms.emplace_back(L.at(L.p_chp, c, t), 1.0);
        if (L.has_wind) terms.emplace_back(L.at(L.p_wind, 0, t), 1.0);
        if (L.has_pv) terms.emplace_back(L.at(L.p_pv, 0, t), 1.0);
        for (int k = 0; k < L.num_eb; ++k) terms.emplace_back(L.at(L.p_eb, k, t), -1.0);
        for (int k = 0; k < L.num_pump; ++k) terms.emplace_back(L.at(L.p_pump, k, t), -1.0);
        for (int k = 0; k < L.num_tes; ++k) {
            terms.emplace_back(L.at(L.tes_in, k, t), -cfg.tes.aux_power);
            terms.emplace_back(L.at(L.tes_out, k, t), -cfg.tes.aux_power);
        }
        for (int k = 0; k < L.num_csh; ++k) {
            terms.emplace_back(L.at(L.csh_in, k, t), -cfg.csh.storage.aux_power);
            terms.emplace_back(L.at(L.csh_out, k, t), -cfg.csh.storage.aux_power);
            terms.emplace_back(L.at(L.csh_p, k, t), -1.0);
        }
        rows.equality(terms, day.electric_load[static_cast<std::size_t>(t)]);
    }

    // Heat network: E_t = E_{t-1} + (1 - loss) H_in_t - H_load_{t + delay}, cyclic.
    if (L.has_heat) {
        const double keep = 1.0 - cfg.network.loss;
        for (int t = 0; t < T; ++t) {
            Terms terms{{L.state(L.e_net, 0, t + 1), 1.0}, {L.state(L.e_net, 0, t), -1.0}};
            for (int c = 0; c < L.num_chp; ++c) terms.emplace_back(L.at(L.h_chp, c, t), -keep);
            for (int k = 0; k < L.num_pump; ++k) terms.emplace_back(L.at(L.h_pump, k, t), -keep);
            for (int k = 0; k < L.num_eb; ++k) terms.emplace_back(L.at(L.h_eb, k, t), -keep);
            for (int k = 0; k < L.num_tes; ++k) {
                terms.emplace_back(L.at(L.tes_out, k, t), -keep);
                terms.emplace_back(L.at(L.tes_in, k, t), keep);
            }
            for (int k = 0; k < L.num_csh; ++k) terms.emplace_back(L.at(L.csh_out, k, t), -keep);
            const auto delivered = static_cast<std::size_t>((t + cfg.network.delay) % T);
            rows.equality(terms, -day.heat_load[delivered]);
        }
        rows.equality({{L.state(L.e_net, 0, 0), 1.0}, {L.state(L.e_net, 0, T), -1.0}}, 0.0);
        for (int t = 0; t <= T; ++t) bound(L.state(L.e_net, 0, t), cfg.network.e_min, cfg.network.e_max);
    }

    // Variable bounds as identity rows.
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (lo[k] > -kInfinity || hi[k] < kInfinity) rows.inequality({{i, 1.0}}, lo[k], hi[k]);
    }

    auto& qp = out.qp;
    qp.Q.resize(n, n);
    qp.Q.setFromTriplets(q_entries.begin(), q_entries.end());
    qp.q = lin + out.tie_break;
    rows.finish(qp, n);
    return out;
}

namespace {

Eigen::MatrixXd unpack(const Eigen::VectorXd& z, int base, int units, int per) {
    Eigen::MatrixXd m(units, per);
    for (int u = 0; u < units; ++u)
        for (int t = 0; t < per; ++t) m(u, t) = z(base + u * per + t);
    return m;
}

DaySchedule unpack_schedule(const DayLayout& L, const Eigen::VectorXd& z) {
    const int T = L.horizon;
    DaySchedule s;
    s.p_thermal = unpack(z, L.p_thermal, L.num_thermal, T);
    s.p_chp = unpack(z, L.p_chp, L.num_chp, T);
    s.h_chp = unpack(z, L.h_chp, L.num_chp, T);
    s.p_eb = unpack(z, L.p_eb, L.num_eb, T);
    s.h_eb = unpack(z, L.h_eb, L.num_eb, T);
    s.p_pump = unpack(z, L.p_pump, L.num_pump, T);
    s.h_pump = unpack(z, L.h_pump, L.num_pump, T);
    s.tes_in = unpack(z, L.tes_in, L.num_tes, T);
    s.tes_out = unpack(z, L.tes_out, L.num_tes, T);
    s.tes_q = unpack(z, L.tes_q, L.num_tes, T + 1);
    s.csh_p = unpack(z, L.csh_p, L.num_csh, T);
    s.csh_in = unpack(z, L.csh_in, L.num_csh, T);
    s.csh_out = unpack(z, L.csh_out, L.num_csh, T);
    s.csh_q = unpack(z, L.csh_q, L.num_csh, T + 1);
    s.p_wind = L.has_wind ? Eigen::VectorXd(z.segment(L.p_wind, T)) : Eigen::VectorXd::Zero(T);
    s.p_pv = L.has_pv ? Eigen::VectorXd(z.segment(L.p_pv, T)) : Eigen::VectorXd::Zero(T);
    s.e_net = L.has_heat ? Eigen::VectorXd(z.segment(L.e_net, T + 1)) : Eigen::VectorXd::Zero(T + 1);
    return s;
}

}  // namespace

double schedule_cost(const SystemConfig& cfg, const DaySchedule& s) {
    double cost = 0.0;
    const auto T = s.p_wind.size();
    for (Eigen::Index g = 0; g < s.p_thermal.rows(); ++g) {
        const auto& c = cfg.thermal[static_cast<std::size_t>(g)].cost;
        for (Eigen::Index t = 0; t < T; ++t) {
            const double p = s.p_thermal(g, t);
            cost += c[0] * p * p + c[1] * p + c[2];
        }
    }
    for (Eigen::Index i = 0; i < s.p_chp.rows(); ++i) {
        const auto& c = cfg.chp[static_cast<std::size_t>(i)].cost;
        for (Eigen::Index t = 0; t < T; ++t) {
            const double p = s.p_chp(i, t);
            const double h = s.h_chp(i, t);
            cost += c[0] * p * p + c[1] * p + c[2] + c[3] * h * h + c[4] * h + c[5] * h * p;
        }
    }
    cost += cfg.eb_operating_price * s.p_eb.sum();
    cost += cfg.csh_operating_price * s.csh_p.sum();
    return cost;
}

DispatchResult simulate_day(const SystemConfig& cfg, const CapacityScheme& scheme, const TypicalDay& day,
                            const solver::SolverSettings& settings) {
    DispatchResult r;
    r.weight = day.weight;
    DayProblem problem;
    try {
        problem = build_day_problem(cfg, scheme, day);
    } catch (const StructurallyInfeasible& e) {
        r.feasible = false;
        r.status = solver::SolveStatus::infeasible;
        r.message = e.what();
        return r;
    }
    auto sol = solver::solve_qp(problem.qp, settings);
    if (sol.status == solver::SolveStatus::max_iter && settings.adaptive_rho) {
        // Seen on storage-heavy days: rho keeps being retuned and the iterate
        // never settles. A fixed rho with a longer run gets there.
        solver::SolverSettings retry = settings;
        retry.adaptive_rho = false;
        retry.max_iter = 4 * settings.max_iter;
        sol = solver::solve_qp(problem.qp, retry);
    }
    r.status = sol.status;
    if (sol.status != solver::SolveStatus::optimal) {
        r.feasible = false;
        r.message = "dispatch solve ended with status " + solver::to_string(sol.status);
        return r;
    }
    r.feasible = true;
    r.schedule = unpack_schedule(problem.layout, sol.z);
    r.day_cost = schedule_cost(cfg, r.schedule);
    r.day_res = r.schedule.p_wind.sum() + r.schedule.p_pv.sum();
    r.weighted_cost = day.weight * r.day_cost;
    r.weighted_res = day.weight * r.day_res;
    return r;
}

double ResidualReport::max() const {
    return std::max({power_balance, heat_network, network_bounds, generator_limits, ramp, chp_region, res_limits,
                     conversion, storage});
}

ResidualReport check_residuals(const SystemConfig& cfg, const CapacityScheme& scheme, const TypicalDay& day,
                               const DaySchedule& s) {
    ResidualReport r;
    const auto T = static_cast<Eigen::Index>(day.horizon());
    auto above = [](double v, double limit) { return std::max(0.0, v - limit); };
    auto below = [](double v, double limit) { return std::max(0.0, limit - v); };

    for (Eigen::Index t = 0; t < T; ++t) {
        double supply = s.p_wind(t) + s.p_pv(t);
        if (s.p_thermal.size() > 0) supply += s.p_thermal.col(t).sum();
        if (s.p_chp.size() > 0) supply += s.p_chp.col(t).sum();
        double demand = day.electric_load[static_cast<std::size_t>(t)];
        if (s.p_eb.size() > 0) demand += s.p_eb.col(t).sum();
        if (s.p_pump.size() > 0) demand += s.p_pump.col(t).sum();
        if (s.tes_in.size() > 0) demand += cfg.tes.aux_power * (s.tes_in.col(t).sum() + s.tes_out.col(t).sum());
        if (s.csh_in.size() > 0)
            demand += cfg.csh.storage.aux_power * (s.csh_in.col(t).sum() + s.csh_out.col(t).sum()) + s.csh_p.col(t).sum();
        r.power_balance = std::max(r.power_balance, std::abs(supply - demand));

        r.res_limits = std::max({r.res_limits, below(s.p_wind(t), 0.0), below(s.p_pv(t), 0.0)});
        if (cfg.wind_capacity > 0.0)
            r.res_limits = std::max(r.res_limits, above(s.p_wind(t), wind_available(cfg, day, static_cast<int>(t))));
        if (cfg.pv_capacity > 0.0)
            r.res_limits = std::max(r.res_limits, above(s.p_pv(t), pv_available(cfg, day, static_cast<int>(t))));
    }

    const bool has_heat = s.e_net.size() == T + 1 &&
                          (cfg.chp.size() + cfg.num_eb() + cfg.num_pump() + cfg.num_tes() + cfg.num_csh()) > 0;
    if (has_heat) {
        const double keep = 1.0 - cfg.network.loss;
        for (Eigen::Index t = 0; t < T; ++t) {
            double injected = 0.0;
            if (s.h_chp.size() > 0) injected += s.h_chp.col(t).sum();
            if (s.h_pump.size() > 0) injected += s.h_pump.col(t).sum();
            if (s.h_eb.size() > 0) injected += s.h_eb.col(t).sum();
            if (s.tes_out.size() > 0) injected += s.tes_out.col(t).sum() - s.tes_in.col(t).sum();
            if (s.csh_out.size() > 0) injected += s.csh_out.col(t).sum();
            const double load = day.heat_load[static_cast<std::size_t>((t + cfg.network.delay) % T)];
            r.heat_network = std::max(r.heat_network, std::abs(s.e_net(t + 1) - s.e_net(t) - keep * injected + load));
        }
        r.heat_network = std::max(r.heat_network, std::abs(s.e_net(0) - s.e_net(T)));
        for (Eigen::Index t = 0; t <= T; ++t)
            r.network_bounds = std::max({r.network_bounds, below(s.e_net(t), cfg.network.e_min),
                                         above(s.e_net(t), cfg.network.e_max)});
    }

    for (Eigen::Index g = 0; g < s.p_thermal.rows(); ++g) {
        const auto& gen = cfg.thermal[static_cast<std::size_t>(g)];
        for (Eigen::Index t = 0; t < T; ++t) {
            r.generator_limits = std::max({r.generator_limits, below(s.p_thermal(g, t), gen.p_min),
                                           above(s.p_thermal(g, t), gen.p_max)});
            if (t > 0) r.ramp = std::max(r.ramp, above(std::abs(s.p_thermal(g, t) - s.p_thermal(g, t - 1)), gen.ramp));
        }
    }
    for (Eigen::Index i = 0; i < s.p_chp.rows(); ++i) {
        const auto& c = cfg.chp[static_cast<std::size_t>(i)];
        for (Eigen::Index t = 0; t < T; ++t) {
            const double p = s.p_chp(i, t);
            const double h = s.h_chp(i, t);
            r.generator_limits = std::max({r.generator_limits, below(h, c.h_min), above(h, c.h_max)});
            r.chp_region = std::max({r.chp_region, below(p, c.p_min - c.c_vcd * h), below(p, c.c_m * h + c.intercept()),
                                     above(p, c.p_max - c.c_cab * h)});
            if (t > 0) r.ramp = std::max(r.ramp, above(std::abs(p - s.p_chp(i, t - 1)), c.ramp));
        }
    }
    for (Eigen::Index k = 0; k < s.p_eb.rows(); ++k) {
        const double rated = scheme.eb_rated[static_cast<std::size_t>(k)];
        for (Eigen::Index t = 0; t < T; ++t) {
            r.generator_limits = std::max({r.generator_limits, below(s.p_eb(k, t), 0.0), above(s.p_eb(k, t), rated)});
            r.conversion = std::max(r.conversion, std::abs(s.h_eb(k, t) - cfg.boiler.efficiency * s.p_eb(k, t)));
        }
    }
    for (Eigen::Index k = 0; k < s.p_pump.rows(); ++k) {
        const double rated = scheme.pump_rated[static_cast<std::size_t>(k)];
        for (Eigen::Index t = 0; t < T; ++t) {
            r.generator_limits = std::max({r.generator_limits, below(s.p_pump(k, t), 0.0), above(s.p_pump(k, t), rated)});
            r.conversion = std::max(r.conversion, std::abs(s.h_pump(k, t) - cfg.pump.cop * s.p_pump(k, t)));
        }
    }
    auto check_storage = [&](const StorageSpec& spec, const std::vector<double>& caps, const Eigen::MatrixXd& in,
                             const Eigen::MatrixXd& out, const Eigen::MatrixXd& q) {
        for (Eigen::Index k = 0; k < q.rows(); ++k) {
            const double cap = caps[static_cast<std::size_t>(k)];
            const double in_max = spec.charge_rate * cap;
            const double out_max = spec.discharge_rate * cap;
            for (Eigen::Index t = 0; t < T; ++t) {
                const double expected = (1.0 - spec.self_discharge) * q(k, t) + in(k, t) - out(k, t);
                r.storage = std::max({r.storage, std::abs(q(k, t + 1) - expected), below(in(k, t), 0.0),
                                      above(in(k, t), in_max), below(out(k, t), 0.0), above(out(k, t), out_max)});
                const double drift = (1.0 - spec.self_discharge) * q(k, t) - q(k, t + 1);
                r.storage = std::max({r.storage, below(drift, -in_max), above(drift, out_max)});
            }
            for (Eigen::Index t = 0; t <= T; ++t)
                r.storage = std::max({r.storage, below(q(k, t), 0.0), above(q(k, t), cap)});
            r.storage = std::max(r.storage, std::abs(q(k, 0) - q(k, T)));
        }
    };
    check_storage(cfg.tes, scheme.tes_capacity, s.tes_in, s.tes_out, s.tes_q);
    check_storage(cfg.csh.storage, scheme.csh_capacity, s.csh_in, s.csh_out, s.csh_q);
    for (Eigen::Index k = 0; k < s.csh_p.rows(); ++k)
        for (Eigen::Index t = 0; t < T; ++t) {
            r.conversion = std::max(r.conversion, std::abs(s.csh_in(k, t) - cfg.csh.conversion * s.csh_p(k, t)));
            r.generator_limits = std::max(r.generator_limits, below(s.csh_p(k, t), 0.0));
        }
    return r;
}

}  // namespace heatplan::dispatch
