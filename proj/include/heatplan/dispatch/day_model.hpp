#pragma once

// Single-day operation simulation: builds the dispatch QP for one scenario
// day and a fixed capacity scheme, solves it, and unpacks the schedules.

#include "heatplan/dispatch/system.hpp"
#include "heatplan/solver/qp.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace heatplan::dispatch {

/// Raised by the capacity pre-check when a day cannot be served whatever the
/// dispatch.
class StructurallyInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column offsets of every variable family. Unit-major blocks: index of
/// (unit u, step t) is base + u * T + t; state blocks hold T + 1 entries
/// (step 0 is the cyclic initial state).
struct DayLayout {
    int horizon{0};
    int num_thermal{0}, num_chp{0}, num_eb{0}, num_pump{0}, num_tes{0}, num_csh{0};
    bool has_wind{false}, has_pv{false}, has_heat{false};

    int p_thermal{-1};
    int p_chp{-1}, h_chp{-1};
    int p_wind{-1}, p_pv{-1};
    int p_eb{-1}, h_eb{-1};
    int p_pump{-1}, h_pump{-1};
    int tes_in{-1}, tes_out{-1}, tes_q{-1};
    int csh_p{-1}, csh_in{-1}, csh_out{-1}, csh_q{-1};
    int e_net{-1};
    int num_vars{0};

    [[nodiscard]] int at(int base, int unit, int t) const { return base + unit * horizon + t; }
    [[nodiscard]] int state(int base, int unit, int t) const { return base + unit * (horizon + 1) + t; }
};

struct DayProblem {
    solver::QuadraticProgram qp;
    DayLayout layout;
    /// Fixed fuel cost terms (c3 of every generator), weighted, not in the QP.
    double constant_cost{0.0};
    /// Linear tie-break cost included in the QP objective, per unit of each variable.
    Eigen::VectorXd tie_break;
    double weight{1.0};
};

/// Encodes power balance, heat-network inertia, generator, CHP-region, RES,
/// pump, boiler and storage constraints. Costs are multiplied by day.weight.
/// Throws StructurallyInfeasible when the capacity pre-check fails.
[[nodiscard]] DayProblem build_day_problem(const SystemConfig& cfg, const CapacityScheme& scheme,
                                           const TypicalDay& day);

/// Unit x step matrices (states have T + 1 columns).
struct DaySchedule {
    Eigen::MatrixXd p_thermal, p_chp, h_chp, p_eb, h_eb, p_pump, h_pump;
    Eigen::MatrixXd tes_in, tes_out, tes_q, csh_p, csh_in, csh_out, csh_q;
    Eigen::VectorXd p_wind, p_pv, e_net;
};

struct DispatchResult {
    bool feasible{false};
    solver::SolveStatus status{solver::SolveStatus::infeasible};
    std::string message;
    double weight{1.0};
    double day_cost{0.0};        // generation cost of one day
    double day_res{0.0};         // consumed wind + PV energy of one day, MWh
    double weighted_cost{0.0};   // weight * day_cost
    double weighted_res{0.0};
    DaySchedule schedule;
};

[[nodiscard]] DispatchResult simulate_day(const SystemConfig& cfg, const CapacityScheme& scheme,
                                          const TypicalDay& day,
                                          const solver::SolverSettings& settings = {});

/// Generation cost of a schedule computed directly from the fuel-cost
/// formulas (no tie-break), for one day.
[[nodiscard]] double schedule_cost(const SystemConfig& cfg, const DaySchedule& s);

/// Largest violation of each constraint family for a schedule.
struct ResidualReport {
    double power_balance{0.0};
    double heat_network{0.0};
    double network_bounds{0.0};
    double generator_limits{0.0};
    double ramp{0.0};
    double chp_region{0.0};
    double res_limits{0.0};
    double conversion{0.0};
    double storage{0.0};

    [[nodiscard]] double max() const;
};

[[nodiscard]] ResidualReport check_residuals(const SystemConfig& cfg, const CapacityScheme& scheme,
                                             const TypicalDay& day, const DaySchedule& s);

}  // namespace heatplan::dispatch
