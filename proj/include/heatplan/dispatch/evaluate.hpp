#pragma once

// Planning objectives of a capacity scheme over a set of scenario days.

#include "heatplan/dispatch/day_model.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace heatplan::dispatch {

struct ObjectivePair {
    double annual_cost{0.0};       // $ per year, investment plus generation
    double neg_res_consumed{0.0};  // -MWh per year
};

/// Infeasible days cost factor x the largest feasible day cost seen so far
/// and consume no RES. Before any feasible day has been seen the bound is
/// the cost of running every generator flat out for the whole day.
class PenaltyPolicy {
public:
    explicit PenaltyPolicy(double factor = 10.0) : factor_(factor) {}

    void observe_feasible(double day_cost) { largest_ = std::max(largest_.value_or(day_cost), day_cost); }
    [[nodiscard]] double day_penalty(const SystemConfig& cfg, std::size_t horizon) const;
    [[nodiscard]] std::optional<double> largest_feasible() const { return largest_; }
    [[nodiscard]] double factor() const { return factor_; }

private:
    double factor_;
    std::optional<double> largest_;
};

struct SchemeEvaluation {
    ObjectivePair objectives;
    double investment{0.0};
    double generation{0.0};     // sum of weight x day cost, penalties included
    double res_consumed{0.0};   // sum of weight x day RES
    int infeasible_days{0};
    bool penalized() const { return infeasible_days > 0; }
    std::vector<DispatchResult> days;  // schedules dropped unless requested
};

struct EvaluateOptions {
    bool keep_schedules{false};
    solver::SolverSettings solver;
};

/// annual_cost = investment + sum_d T_d * C_gen,d; neg_res = -sum_d T_d * RES_d.
/// Infeasible days go through the policy; when policy is null a local one
/// is used for this call only.
[[nodiscard]] SchemeEvaluation evaluate_scheme(const SystemConfig& cfg, const CapacityScheme& scheme,
                                               const std::vector<TypicalDay>& days, PenaltyPolicy* policy = nullptr,
                                               const EvaluateOptions& options = {});

}  // namespace heatplan::dispatch
