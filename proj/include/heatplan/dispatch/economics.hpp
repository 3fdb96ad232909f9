#pragma once

#include "heatplan/dispatch/system.hpp"

namespace heatplan::dispatch {

/// Annuity factor tau (1+tau)^T / ((1+tau)^T - 1). Throws std::domain_error
/// for tau <= 0 or lifetime < 1.
[[nodiscard]] double capital_recovery(double rate, int lifetime_years);

/// Equivalent annual investment plus O&M of a scheme, in $ per year.
[[nodiscard]] double investment_cost(const CapacityScheme& scheme, const SystemConfig& cfg);

}  // namespace heatplan::dispatch
