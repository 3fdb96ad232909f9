#include "heatplan/dispatch/evaluate.hpp"

#include "heatplan/dispatch/economics.hpp"

#include <stdexcept>

namespace heatplan::dispatch {

double PenaltyPolicy::day_penalty(const SystemConfig& cfg, std::size_t horizon) const {
    if (largest_) return factor_ * *largest_;
    double flat_out = 0.0;
    for (const auto& g : cfg.thermal) flat_out += g.cost[0] * g.p_max * g.p_max + g.cost[1] * g.p_max + g.cost[2];
    for (const auto& c : cfg.chp) {
        const auto& k = c.cost;
        flat_out += k[0] * c.p_max * c.p_max + k[1] * c.p_max + k[2] + k[3] * c.h_max * c.h_max + k[4] * c.h_max +
                    k[5] * c.h_max * c.p_max;
    }
    return factor_ * std::max(1.0, flat_out * static_cast<double>(horizon));
}

SchemeEvaluation evaluate_scheme(const SystemConfig& cfg, const CapacityScheme& scheme,
                                 const std::vector<TypicalDay>& days, PenaltyPolicy* policy,
                                 const EvaluateOptions& options) {
    if (days.empty()) throw std::invalid_argument("evaluate_scheme needs at least one day");
    scheme.validate(cfg);
    PenaltyPolicy local;
    PenaltyPolicy& pol = policy ? *policy : local;

    SchemeEvaluation ev;
    ev.investment = investment_cost(scheme, cfg);
    std::vector<DispatchResult> results;
    results.reserve(days.size());
    for (const auto& day : days) {
        auto r = simulate_day(cfg, scheme, day, options.solver);
        if (r.feasible) pol.observe_feasible(r.day_cost);
        results.push_back(std::move(r));
    }
    // Penalties use the largest feasible cost including this scheme's own days.
    for (std::size_t i = 0; i < results.size(); ++i) {
        auto& r = results[i];
        if (r.feasible) {
            ev.generation += r.weighted_cost;
            ev.res_consumed += r.weighted_res;
        } else {
            ++ev.infeasible_days;
            r.day_cost = pol.day_penalty(cfg, days[i].horizon());
            r.day_res = 0.0;
            r.weighted_cost = r.weight * r.day_cost;
            r.weighted_res = 0.0;
            ev.generation += r.weighted_cost;
        }
        if (!options.keep_schedules) r.schedule = {};
    }
    ev.days = std::move(results);
    ev.objectives.annual_cost = ev.investment + ev.generation;
    ev.objectives.neg_res_consumed = -ev.res_consumed;
    return ev;
}

}  // namespace heatplan::dispatch
