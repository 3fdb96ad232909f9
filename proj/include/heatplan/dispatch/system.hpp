#pragma once

// Plant, network and equipment description of an electric-heat coupled system,
// plus the capacity scheme being planned and the scenario days it is run on.

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace heatplan::dispatch {

struct ThermalGenerator {
    std::string name;
    std::array<double, 3> cost{};  // c1 [$/MW^2h], c2 [$/MWh], c3 [$/h]
    double p_min{0.0};
    double p_max{0.0};
    double ramp{0.0};  // MW per step
};

struct ChpGenerator {
    std::string name;
    /// c1 P^2 + c2 P + c3 + c4 H^2 + c5 H + c6 H P
    std::array<double, 6> cost{};
    double c_vcd{0.0};  // slope of the lower boundary P >= P_min - c_vcd H
    double c_m{0.0};    // back-pressure slope P >= c_m H + c_k
    double c_cab{0.0};  // upper boundary P <= P_max - c_cab H
    std::optional<double> c_k;
    double p_min{0.0};
    double p_max{0.0};
    double h_min{0.0};
    double h_max{0.0};
    double ramp{0.0};

    /// Intercept of the back-pressure line. Defaults to the value making both
    /// lower boundaries meet at H = h_min.
    [[nodiscard]] double intercept() const;
};

struct HeatNetwork {
    double loss{0.02};  // fraction of injected heat lost per step
    int delay{1};       // steps between injection and delivery
    double e_min{0.0};  // MWh
    double e_max{0.0};
};

/// Investment data shared by every equipment kind.
struct Economics {
    double unit_price{0.0};  // $ per MW (boiler, pump) or $ per MWh (storage)
    int lifetime{25};        // years
    double om_rate{0.02};    // fraction of investment per year
};

struct BoilerSpec {
    Economics economics{300000.0, 25, 0.02};
    double efficiency{0.95};  // heat out per MWh electricity
};

struct PumpSpec {
    Economics economics{3000000.0, 15, 0.02};
    double cop{4.0};
};

struct StorageSpec {
    Economics economics{100000.0, 25, 0.02};
    double self_discharge{0.0043804};  // fraction of stored heat lost per step
    double aux_power{0.01};            // MW electricity per MW of heat moved in or out
    double charge_rate{0.25};          // max charge per step, fraction of capacity
    double discharge_rate{0.25};
};

struct CshSpec {
    StorageSpec storage{{50000.0, 15, 0.02}, 0.01, 0.005, 0.125, 0.25};
    double conversion{0.95};  // heat stored per MWh electricity
};

/// Upper bound of the search box for each planned unit.
struct SearchLimits {
    std::vector<double> eb_rated;      // MW
    std::vector<double> pump_rated;    // MW
    std::vector<double> tes_capacity;  // MWh
    std::vector<double> csh_capacity;  // MWh
};

struct SystemConfig {
    std::vector<ThermalGenerator> thermal;
    std::vector<ChpGenerator> chp;
    HeatNetwork network;
    double eb_operating_price{2.0};   // $ per MWh consumed
    double csh_operating_price{2.0};  // $ per MWh consumed
    BoilerSpec boiler;
    PumpSpec pump;
    StorageSpec tes;
    CshSpec csh;
    double interest_rate{0.05};
    double wind_capacity{0.0};  // MW, 0 disables wind dispatch variables
    double pv_capacity{0.0};
    /// Cost per MWh of pump consumption and storage throughput added to the
    /// dispatch objective only; selects among otherwise tied schedules.
    double tie_break{0.01};
    SearchLimits limits;

    [[nodiscard]] std::size_t num_eb() const { return limits.eb_rated.size(); }
    [[nodiscard]] std::size_t num_pump() const { return limits.pump_rated.size(); }
    [[nodiscard]] std::size_t num_tes() const { return limits.tes_capacity.size(); }
    [[nodiscard]] std::size_t num_csh() const { return limits.csh_capacity.size(); }

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

struct CapacityScheme {
    std::vector<double> eb_rated;
    std::vector<double> pump_rated;
    std::vector<double> tes_capacity;
    std::vector<double> csh_capacity;

    /// Scheme with every planned unit at zero.
    [[nodiscard]] static CapacityScheme zero(const SystemConfig& cfg);

    /// Throws std::invalid_argument when sizes mismatch the config, entries are
    /// negative, or exceed the search limits.
    void validate(const SystemConfig& cfg) const;

    [[nodiscard]] std::vector<double> flatten() const;
};

struct TypicalDay {
    std::vector<double> electric_load;  // MW per step
    std::vector<double> heat_load;
    std::vector<double> wind_max;
    std::vector<double> pv_max;
    double weight{1.0};  // days represented

    [[nodiscard]] std::size_t horizon() const { return electric_load.size(); }
    /// Requires equal-length non-negative series and a positive weight.
    void validate() const;
};

}  // namespace heatplan::dispatch
