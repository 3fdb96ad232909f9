#pragma once

// Season-wide sample-average benchmark and the estimator error metrics.

#include "heatplan/dispatch/evaluate.hpp"
#include "heatplan/scenario/season.hpp"

#include <string>
#include <vector>

namespace heatplan::baselines {

struct SaaResult {
    dispatch::ObjectivePair objectives;
    double investment{0.0};
    double mean_day_cost{0.0};  // over feasible days
    double mean_day_res{0.0};
    int days{0};
    int infeasible_days{0};
    std::vector<std::size_t> infeasible;  // season day indices
};

/// Every season day is dispatched with weight 1; infeasible days are left
/// out of the averages, which are then scaled to the full season length.
/// Throws std::runtime_error when more than 5% of the days are infeasible.
[[nodiscard]] SaaResult saa_benchmark(const dispatch::SystemConfig& cfg, const dispatch::CapacityScheme& scheme,
                                      const scenario::SeasonData& season,
                                      const solver::SolverSettings& settings = {});

struct ErrorReport {
    double posterior_cost{0.0};  // mean |mu - SAA| / |SAA|, annual cost
    double posterior_res{0.0};
    double raw_cost{0.0};        // same for the raw typical-scenario observation
    double raw_res{0.0};
    int schemes_cost{0};         // schemes entering each average
    int schemes_res{0};
    /// Scheme indices dropped from an average because the SAA value was 0.
    std::vector<std::size_t> excluded_cost, excluded_res;
};

/// All lists aligned by scheme. Throws std::invalid_argument on length
/// mismatch or an empty list.
[[nodiscard]] ErrorReport error_metrics(const std::vector<dispatch::ObjectivePair>& posterior_means,
                                        const std::vector<dispatch::ObjectivePair>& raw_observations,
                                        const std::vector<dispatch::ObjectivePair>& saa);

}  // namespace heatplan::baselines
