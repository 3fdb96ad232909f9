#include "heatplan/baselines/saa.hpp"

#include "heatplan/dispatch/economics.hpp"

#include <cmath>
#include <stdexcept>

namespace heatplan::baselines {

SaaResult saa_benchmark(const dispatch::SystemConfig& cfg, const dispatch::CapacityScheme& scheme,
                        const scenario::SeasonData& season, const solver::SolverSettings& settings) {
    if (season.days.empty()) throw std::invalid_argument("SAA needs a non-empty season");
    scheme.validate(cfg);
    auto days = season.as_days();
    SaaResult out;
    out.days = static_cast<int>(days.size());
    out.investment = dispatch::investment_cost(scheme, cfg);
    double cost = 0.0, res = 0.0;
    int feasible = 0;
    for (std::size_t i = 0; i < days.size(); ++i) {
        days[i].weight = 1.0;
        const auto r = dispatch::simulate_day(cfg, scheme, days[i], settings);
        if (!r.feasible) {
            out.infeasible.push_back(i);
            continue;
        }
        cost += r.day_cost;
        res += r.day_res;
        ++feasible;
    }
    out.infeasible_days = static_cast<int>(out.infeasible.size());
    if (out.infeasible_days > 0.05 * out.days)
        throw std::runtime_error("SAA: " + std::to_string(out.infeasible_days) + " of " + std::to_string(out.days) +
                                 " season days are infeasible (more than 5%)");
    out.mean_day_cost = cost / feasible;
    out.mean_day_res = res / feasible;
    out.objectives.annual_cost = out.investment + out.mean_day_cost * out.days;
    out.objectives.neg_res_consumed = -out.mean_day_res * out.days;
    return out;
}

ErrorReport error_metrics(const std::vector<dispatch::ObjectivePair>& posterior_means,
                          const std::vector<dispatch::ObjectivePair>& raw_observations,
                          const std::vector<dispatch::ObjectivePair>& saa) {
    if (saa.empty()) throw std::invalid_argument("error metrics need at least one scheme");
    if (posterior_means.size() != saa.size() || raw_observations.size() != saa.size())
        throw std::invalid_argument("error metrics need aligned estimator and SAA lists");
    ErrorReport e;
    for (std::size_t i = 0; i < saa.size(); ++i) {
        const double c = saa[i].annual_cost;
        if (c == 0.0) {
            e.excluded_cost.push_back(i);
        } else {
            e.posterior_cost += std::abs(posterior_means[i].annual_cost - c) / std::abs(c);
            e.raw_cost += std::abs(raw_observations[i].annual_cost - c) / std::abs(c);
            ++e.schemes_cost;
        }
        const double r = saa[i].neg_res_consumed;
        if (r == 0.0) {
            e.excluded_res.push_back(i);
        } else {
            e.posterior_res += std::abs(posterior_means[i].neg_res_consumed - r) / std::abs(r);
            e.raw_res += std::abs(raw_observations[i].neg_res_consumed - r) / std::abs(r);
            ++e.schemes_res;
        }
    }
    if (e.schemes_cost > 0) e.posterior_cost /= e.schemes_cost, e.raw_cost /= e.schemes_cost;
    if (e.schemes_res > 0) e.posterior_res /= e.schemes_res, e.raw_res /= e.schemes_res;
    return e;
}

}  // namespace heatplan::baselines
