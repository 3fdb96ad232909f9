#include "heatplan/dispatch/system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heatplan::dispatch {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void check_economics(const Economics& e, const std::string& kind) {
    require(e.unit_price >= 0.0, kind + ": unit price must be non-negative");
    require(e.lifetime >= 1, kind + ": lifetime must be at least one year");
    require(e.om_rate >= 0.0, kind + ": O&M rate must be non-negative");
}

void check_storage(const StorageSpec& s, const std::string& kind) {
    check_economics(s.economics, kind);
    require(s.self_discharge >= 0.0 && s.self_discharge < 1.0, kind + ": self-discharge must lie in [0, 1)");
    require(s.aux_power >= 0.0, kind + ": auxiliary power coefficient must be non-negative");
    require(s.charge_rate > 0.0 && s.discharge_rate > 0.0, kind + ": charge/discharge rates must be positive");
}

void check_sizes(const std::vector<double>& values, const std::vector<double>& limits, const std::string& kind) {
    require(values.size() == limits.size(), kind + ": expected " + std::to_string(limits.size()) + " entries");
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]) && values[i] >= 0.0, kind + ": entries must be non-negative");
        require(values[i] <= limits[i] * (1.0 + 1e-12) + 1e-12,
                kind + "[" + std::to_string(i) + "] exceeds its search limit");
    }
}

}  // namespace

double ChpGenerator::intercept() const {
    if (c_k) return *c_k;
    return p_min - (c_vcd + c_m) * h_min;
}

void SystemConfig::validate() const {
    for (const auto& g : thermal) {
        require(g.p_min <= g.p_max, "thermal generator " + g.name + ": P_min exceeds P_max");
        require(g.ramp >= 0.0, "thermal generator " + g.name + ": ramp must be non-negative");
    }
    for (const auto& c : chp) {
        require(c.p_min <= c.p_max, "CHP " + c.name + ": P_min exceeds P_max");
        require(c.h_min <= c.h_max, "CHP " + c.name + ": H_min exceeds H_max");
        require(c.ramp >= 0.0, "CHP " + c.name + ": ramp must be non-negative");
        require(c.c_vcd >= 0.0 && c.c_m >= 0.0 && c.c_cab >= 0.0, "CHP " + c.name + ": region slopes must be non-negative");
        require(4.0 * c.cost[0] * c.cost[3] >= c.cost[5] * c.cost[5] && c.cost[0] >= 0.0 && c.cost[3] >= 0.0,
                "CHP " + c.name + ": fuel cost is not convex");
    }
    require(network.e_min <= network.e_max, "heat network: E_min exceeds E_max");
    require(network.loss >= 0.0 && network.loss < 1.0, "heat network: loss must lie in [0, 1)");
    require(network.delay >= 0, "heat network: delay must be non-negative");
    require(boiler.efficiency > 0.0 && boiler.efficiency <= 1.0, "boiler: efficiency must lie in (0, 1]");
    require(csh.conversion > 0.0 && csh.conversion <= 1.0, "CSH: conversion must lie in (0, 1]");
    require(pump.cop >= 1.0, "heat pump: COP must be at least 1");
    check_economics(boiler.economics, "boiler");
    check_economics(pump.economics, "heat pump");
    check_storage(tes, "TES");
    check_storage(csh.storage, "CSH");
    require(interest_rate > 0.0, "interest rate must be positive");
    require(wind_capacity >= 0.0 && pv_capacity >= 0.0, "RES capacities must be non-negative");
    require(eb_operating_price >= 0.0 && csh_operating_price >= 0.0, "operating prices must be non-negative");
    require(tie_break >= 0.0, "tie-break cost must be non-negative");
    for (const auto* v : {&limits.eb_rated, &limits.pump_rated, &limits.tes_capacity, &limits.csh_capacity})
        for (double x : *v) require(std::isfinite(x) && x >= 0.0, "search limits must be finite and non-negative");
}

CapacityScheme CapacityScheme::zero(const SystemConfig& cfg) {
    CapacityScheme s;
    s.eb_rated.assign(cfg.num_eb(), 0.0);
    s.pump_rated.assign(cfg.num_pump(), 0.0);
    s.tes_capacity.assign(cfg.num_tes(), 0.0);
    s.csh_capacity.assign(cfg.num_csh(), 0.0);
    return s;
}

void CapacityScheme::validate(const SystemConfig& cfg) const {
    check_sizes(eb_rated, cfg.limits.eb_rated, "eb_rated");
    check_sizes(pump_rated, cfg.limits.pump_rated, "pump_rated");
    check_sizes(tes_capacity, cfg.limits.tes_capacity, "tes_capacity");
    check_sizes(csh_capacity, cfg.limits.csh_capacity, "csh_capacity");
}

std::vector<double> CapacityScheme::flatten() const {
    std::vector<double> out;
    for (const auto* v : {&eb_rated, &pump_rated, &tes_capacity, &csh_capacity}) out.insert(out.end(), v->begin(), v->end());
    return out;
}

void TypicalDay::validate() const {
    const std::size_t t = electric_load.size();
    require(t > 0, "typical day: empty series");
    require(heat_load.size() == t && wind_max.size() == t && pv_max.size() == t,
            "typical day: series lengths differ");
    for (const auto* v : {&electric_load, &heat_load})
        for (double x : *v) require(std::isfinite(x) && x >= 0.0, "typical day: loads must be finite and non-negative");
    for (const auto* v : {&wind_max, &pv_max})
        for (double x : *v) require(std::isfinite(x), "typical day: RES profiles must be finite");
    require(weight > 0.0, "typical day: weight must be positive");
}

}  // namespace heatplan::dispatch
