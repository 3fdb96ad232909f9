#pragma once

// Planning configuration: one structured-text (JSON) file holding the system,
// the scenario source, the optimizer sections and the evaluation settings.
// Every field has a default; unknown keys are rejected.

#include "heatplan/baselines/nsga2.hpp"
#include "heatplan/dispatch/system.hpp"
#include "heatplan/moo/ambo.hpp"
#include "heatplan/scenario/season.hpp"
#include "heatplan/solver/qp.hpp"
#include "heatplan/synth/synth.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace heatplan::plan {

/// Malformed or inconsistent input (config, data files, flags).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Algorithm { ambo, nsga2, random };
[[nodiscard]] Algorithm parse_algorithm(const std::string& s);
[[nodiscard]] std::string to_string(Algorithm a);

[[nodiscard]] scenario::SelectionMode parse_selection(const std::string& s);
[[nodiscard]] std::string to_string(scenario::SelectionMode m);

struct ScenarioSource {
    enum class Kind { bundle, season, synthetic };
    Kind kind{Kind::synthetic};
    std::string path;  // bundle or season file, resolved against the config's directory
    scenario::SelectionMode selection{scenario::SelectionMode::joint};
    bool adjust{true};
    synth::SynthSpec synthetic;  // used when kind == synthetic
};

struct PlanConfig {
    dispatch::SystemConfig system;
    ScenarioSource scenario;
    Algorithm algorithm{Algorithm::ambo};
    int budget{60};  // objective evaluations
    std::uint64_t seed{0};
    moo::AmboConfig ambo;              // iterations derived from budget
    baselines::Nsga2Config nsga2;      // generations 0: budget / population
    double penalty_factor{10.0};
    solver::SolverSettings solver;
    std::optional<std::array<double, 2>> reference;  // fixed trace reference, raw units

    /// Throws InputError.
    void validate() const;
};

/// base_dir resolves relative file paths. Throws InputError.
[[nodiscard]] PlanConfig parse_plan_config(const nlohmann::json& j, const std::string& base_dir);
[[nodiscard]] PlanConfig load_plan_config(const std::string& path);

/// Fully expanded form (system written out, no preset); parsing it back
/// gives the same config.
[[nodiscard]] nlohmann::json to_json(const PlanConfig& cfg);

[[nodiscard]] nlohmann::json system_to_json(const dispatch::SystemConfig& cfg);
[[nodiscard]] dispatch::SystemConfig system_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json synth_to_json(const synth::SynthSpec& spec);

}  // namespace heatplan::plan
