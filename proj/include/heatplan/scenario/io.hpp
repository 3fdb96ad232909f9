#pragma once

#include "heatplan/scenario/season.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace heatplan::scenario {

/// Hourly CSV with header timestamp,electric_load_mw,heat_load_mw,wind_mw,pv_mw.
/// Timestamps are "YYYY-MM-DD HH:MM" or ISO "YYYY-MM-DDTHH:MM[:SS]".
/// A leading "# synthetic" comment line marks generated data.
[[nodiscard]] SeasonData read_season_csv(std::istream& in);
[[nodiscard]] SeasonData read_season_csv(const std::string& path);
void write_season_csv(std::ostream& out, const SeasonData& season);

/// JSON bundle with the four 24-vectors, weight, chosen indices and (a, b)
/// per series.
[[nodiscard]] std::string bundle_to_json(const std::vector<TypicalScenario>& scenarios, bool synthetic);
[[nodiscard]] std::vector<TypicalScenario> bundle_from_json(const std::string& text, bool* synthetic = nullptr);

}  // namespace heatplan::scenario
