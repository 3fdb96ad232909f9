#include "heatplan/dispatch/economics.hpp"

#include <cmath>
#include <stdexcept>

namespace heatplan::dispatch {

double capital_recovery(double rate, int lifetime_years) {
    if (!(rate > 0.0)) throw std::domain_error("capital recovery needs a positive interest rate");
    if (lifetime_years < 1) throw std::domain_error("capital recovery needs a lifetime of at least one year");
    // tau g / (g - 1) with g - 1 written as tau times the geometric sum: no
    // cancellation for small rates, and T = 1 gives 1 + tau exactly.
    double sum = 0.0, growth = 1.0;
    for (int k = 0; k < lifetime_years; ++k) {
        sum += growth;
        growth *= 1.0 + rate;
    }
    return growth / sum;
}

double investment_cost(const CapacityScheme& scheme, const SystemConfig& cfg) {
    auto annual = [&](const std::vector<double>& sizes, const Economics& e) {
        double total = 0.0;
        for (double s : sizes) total += e.unit_price * s;
        return total * capital_recovery(cfg.interest_rate, e.lifetime) + e.om_rate * total;
    };
    return annual(scheme.eb_rated, cfg.boiler.economics) + annual(scheme.pump_rated, cfg.pump.economics) +
           annual(scheme.tes_capacity, cfg.tes.economics) + annual(scheme.csh_capacity, cfg.csh.storage.economics);
}

}  // namespace heatplan::dispatch
