#pragma once

// Hourly heating-season data grouped into days and months, and the
// moment-matched typical days derived from it.

#include "heatplan/dispatch/system.hpp"

#include <array>
#include <string>
#include <vector>

namespace heatplan::scenario {

inline constexpr std::size_t kHoursPerDay = 24;

enum class Series { electric = 0, heat = 1, wind = 2, pv = 3 };
inline constexpr std::array<Series, 4> kAllSeries{Series::electric, Series::heat, Series::wind, Series::pv};
[[nodiscard]] const char* series_name(Series s);

struct SeasonDay {
    std::string date;   // YYYY-MM-DD
    std::string month;  // YYYY-MM, the grouping key
    std::vector<double> electric_load, heat_load, wind_max, pv_max;

    [[nodiscard]] const std::vector<double>& series(Series s) const;
    [[nodiscard]] std::vector<double>& series(Series s);
};

struct SeasonData {
    std::vector<SeasonDay> days;
    bool synthetic{false};

    /// Throws std::invalid_argument on short days, negative or non-finite values.
    void validate() const;
    /// Day indices per month, months in order of first appearance.
    [[nodiscard]] std::vector<std::pair<std::string, std::vector<std::size_t>>> months() const;
    /// Every day as a weight-1 dispatch scenario.
    [[nodiscard]] std::vector<dispatch::TypicalDay> as_days() const;
};

struct DayFeatures {
    double mean_heat{0.0}, var_heat{0.0};
    double mean_net{0.0}, var_net{0.0};  // net = electric - wind - pv
};

[[nodiscard]] DayFeatures compute_features(const SeasonDay& day);

/// Population mean and variance.
struct Moments {
    double mean{0.0};
    double var{0.0};
};
[[nodiscard]] Moments moments(const std::vector<double>& v);

/// Index (into rows) of the row with the smallest sum of Euclidean distances
/// to all rows after per-column z-scoring; ties go to the lowest index.
[[nodiscard]] std::size_t select_medoid(const std::vector<std::vector<double>>& rows);
/// All rows ordered by that same sum of distances (stable), medoid first.
[[nodiscard]] std::vector<std::size_t> medoid_ranking(const std::vector<std::vector<double>>& rows);
[[nodiscard]] std::size_t select_medoid(const std::vector<DayFeatures>& features);

struct Adjustment {
    std::vector<double> curve;
    double a{1.0};
    double b{0.0};
};

/// S = lift(S')^a mapped back + b, where lift maps the curve affinely onto
/// [1, 2]. a is found by bisection on [0.1, 10] so the variance matches;
/// b then fixes the mean. Throws std::domain_error when no a in the bracket
/// matches (message carries the bracket variances).
[[nodiscard]] Adjustment adjust_curve(const std::vector<double>& curve, double target_mean, double target_var);

enum class SelectionMode {
    joint,        // one medoid per month from heat and net-load moments
    independent,  // one medoid per series from that series' own moments
};

struct SeriesAdjustment {
    std::size_t source_index{0};  // position within the month
    double a{1.0};
    double b{0.0};
    bool adjusted{false};
    std::string warning;
    Moments target;
};

struct TypicalScenario {
    std::string month;
    dispatch::TypicalDay day;
    std::size_t medoid_index{0};  // joint medoid, position within the month
    /// Day actually used. Differs from the medoid when the medoid cannot be
    /// adjusted without negative values; the next-ranked day is taken then.
    std::size_t selected_index{0};
    std::string warning;
    std::array<SeriesAdjustment, 4> series;
};

struct ScenarioOptions {
    SelectionMode mode{SelectionMode::joint};
    bool adjust{true};
};

[[nodiscard]] std::vector<TypicalScenario> generate_typical_scenarios(const SeasonData& season,
                                                                      const ScenarioOptions& options = {});

[[nodiscard]] std::vector<dispatch::TypicalDay> typical_days(const std::vector<TypicalScenario>& scenarios);

}  // namespace heatplan::scenario
