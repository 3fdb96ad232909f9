#pragma once

// Synthetic heating seasons and reference systems. Everything produced here
// is flagged synthetic so reports can say so.

#include "heatplan/dispatch/system.hpp"
#include "heatplan/scenario/season.hpp"

#include <cstdint>
#include <string>

namespace heatplan::synth {

struct SynthSpec {
    int days{180};
    std::string start_date{"2023-11-01"};
    double peak_electric_mw{130.0};
    double peak_heat_mw{80.0};
    double wind_capacity_mw{100.0};
    double pv_capacity_mw{30.0};
    std::uint64_t seed{0};

    // daily / weekly electric shape, fractions of peak
    double base_level{0.62};
    double morning_peak{0.12};
    double evening_peak{0.2};
    double weekend_factor{0.92};

    // temperature (deg C) and its coupling to heat demand
    double mean_temperature{-10.0};
    double seasonal_swing{8.0};  // coldest mid-season
    double diurnal_swing{4.0};
    double heat_at_zero_c{0.25};      // fraction of peak heat at 0 C
    double heat_per_degree{0.025};    // fraction of peak heat per degree below 0 C

    // wind and PV envelopes
    double wind_mean{0.45};  // fraction of fleet capacity
    double sunrise_hour{7.0}, sunset_hour{17.0};

    // noise amplitudes (0 disables)
    double load_noise{0.03};         // relative, hourly
    double heat_noise{0.03};         // relative, hourly
    double temperature_noise{3.0};   // deg C, day-to-day anomaly
    double wind_volatility{0.12};    // hourly innovation of the AR(1) wind factor
    double cloud_noise{0.3};         // day-to-day cloud factor spread

    /// Throws std::invalid_argument: days < 28, non-positive scales, bad date.
    void validate() const;
};

/// Hourly season; deterministic per seed, all values within [0, declared peak/capacity].
[[nodiscard]] scenario::SeasonData generate_season(const SynthSpec& spec);

/// Hourly temperature the season was built from (days x 24, row-major).
[[nodiscard]] std::vector<double> season_temperature(const SynthSpec& spec);

enum class Scale { small, large };
[[nodiscard]] Scale parse_scale(const std::string& s);
[[nodiscard]] std::string to_string(Scale s);

/// small: 2 CHP + 1 thermal unit with the reference coefficients, one slot
/// of each heat source. large: 53 CHP + 32 thermal with coefficients
/// jittered by up to 10%, three slots of each heat source.
[[nodiscard]] dispatch::SystemConfig generate_system(Scale scale, std::uint64_t seed = 0);

/// Season spec sized to match generate_system(scale).
[[nodiscard]] SynthSpec season_spec(Scale scale, std::uint64_t seed = 0);

}  // namespace heatplan::synth
