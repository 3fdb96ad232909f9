#pragma once

// Planning runs on top of the dispatch evaluator: decision-vector encoding,
// the optimizer drivers, and the run-directory artifacts read back by
// benchmark and report.

#include "heatplan/baselines/saa.hpp"
#include "heatplan/dispatch/evaluate.hpp"
#include "heatplan/plan/config.hpp"
#include "heatplan/scenario/season.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace heatplan::plan {

// ---- files ----

/// Writes to path + ".tmp" and renames over path.
void write_atomic(const std::string& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::string& path);
/// 64-bit FNV-1a as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(const std::string& text);
[[nodiscard]] std::string utc_timestamp();

// ---- decision vector ----

/// One searched capacity: a planned unit slot whose limit is positive.
struct Slot {
    std::string kind;  // eb_rated, pump_rated, tes_capacity, csh_capacity
    std::size_t unit{0};
    double upper{0.0};
};

/// Maps the decision vector onto a capacity scheme. Slots with a zero limit
/// are fixed at zero and not searched.
class SchemeCodec {
public:
    explicit SchemeCodec(const dispatch::SystemConfig& cfg);

    [[nodiscard]] const std::vector<Slot>& slots() const { return slots_; }
    [[nodiscard]] std::size_t dims() const { return slots_.size(); }
    [[nodiscard]] gp::InputScaler bounds() const;
    [[nodiscard]] std::vector<std::string> names() const;
    /// Values are clamped into [0, upper].
    [[nodiscard]] dispatch::CapacityScheme decode(const gp::Vector& x) const;
    [[nodiscard]] gp::Vector encode(const dispatch::CapacityScheme& s) const;

private:
    dispatch::CapacityScheme zero_;
    std::vector<Slot> slots_;
};

[[nodiscard]] nlohmann::json scheme_to_json(const dispatch::CapacityScheme& s);

// ---- scenarios ----

struct LoadedScenarios {
    std::vector<scenario::TypicalScenario> scenarios;
    std::vector<dispatch::TypicalDay> days;
    bool synthetic{false};
};

/// Reads or generates the typical days. Unreadable files raise InputError.
[[nodiscard]] LoadedScenarios load_scenarios(const ScenarioSource& src);

// ---- evaluation ----

struct EvaluationRecord {
    std::size_t index{0};
    gp::Vector x;
    dispatch::CapacityScheme scheme;
    bool failed{false};
    std::string error;
    dispatch::ObjectivePair objectives;
    double investment{0.0};
    int infeasible_days{0};
};

/// Objective pair of a decision vector over the typical days. One penalty
/// policy is shared by every call so penalties only depend on call order.
class DispatchEvaluator {
public:
    DispatchEvaluator(const dispatch::SystemConfig& cfg, std::vector<dispatch::TypicalDay> days,
                      double penalty_factor, const solver::SolverSettings& settings);

    moo::Point2 operator()(const gp::Vector& x);
    [[nodiscard]] moo::Evaluator as_evaluator();
    [[nodiscard]] const SchemeCodec& codec() const { return codec_; }
    [[nodiscard]] const std::vector<EvaluationRecord>& records() const { return records_; }

    /// Called after every evaluation, failed or not.
    std::function<void(const EvaluationRecord&)> on_record;

private:
    dispatch::SystemConfig cfg_;
    std::vector<dispatch::TypicalDay> days_;
    SchemeCodec codec_;
    dispatch::PenaltyPolicy policy_;
    dispatch::EvaluateOptions options_;
    std::vector<EvaluationRecord> records_;
};

// ---- runs ----

/// Evaluations of each phase for a budget: ambo n_initial + iterations,
/// nsga2 population x generations, random the budget itself. Throws
/// InputError when the budget cannot hold the initial design.
struct BudgetPlan {
    int n_initial{0};
    int iterations{0};
    int population{0};
    int generations{0};
    int total{0};
};
[[nodiscard]] BudgetPlan plan_budget(const PlanConfig& cfg, std::size_t dims);

/// Worst observed value plus 10% of the observed span, per objective.
/// Non-finite points are ignored.
[[nodiscard]] moo::Point2 default_reference(const std::vector<moo::Point2>& pts);

/// Identifies the objective scaling: system without search limits plus the
/// typical days. Runs with different fingerprints cannot share a report.
[[nodiscard]] std::string objective_fingerprint(const dispatch::SystemConfig& cfg,
                                                const std::vector<dispatch::TypicalDay>& days);

struct PlanSummary {
    std::string out_dir;
    int evaluations{0};
    std::size_t front_size{0};
    moo::Point2 reference{0.0, 0.0};
    std::vector<std::string> artifacts;
};

/// Runs the configured optimizer and writes manifest.json, config.json,
/// scenarios.json, log.jsonl (one line per evaluation), iterations.jsonl
/// (ambo), front.json and trace.csv into out_dir. On failure the manifest is
/// written with status "failed" and the logs stay behind before rethrowing.
PlanSummary run_plan(const PlanConfig& cfg, const std::string& out_dir);

struct BenchmarkSummary {
    baselines::ErrorReport errors;
    std::size_t schemes{0};
    std::vector<std::size_t> saa_failed;  // evaluations whose SAA could not be formed
};

/// SAA over the season for every evaluated scheme of a run, and the
/// posterior-mean vs raw-observation error report. Writes saa.csv and
/// error_report.json into the run directory. config_override replaces the
/// run's config snapshot when non-empty.
BenchmarkSummary benchmark_run(const std::string& run_dir, const std::string& season_path,
                               const std::string& config_override = "");

struct ReportRun {
    std::string label;
    std::string algorithm;
    std::vector<moo::Point2> front;
    double front_hypervolume{0.0};
    std::vector<double> trace;
};

struct ReportSummary {
    moo::Point2 reference{0.0, 0.0};
    std::vector<ReportRun> runs;
};

/// Merges runs into fronts.csv, traces.csv and summary.csv under one fixed
/// reference (given, or derived from every run's observations and fronts).
/// Throws InputError when the runs' objective fingerprints differ.
ReportSummary report_runs(const std::vector<std::string>& run_dirs, const std::string& out_dir,
                          const std::optional<moo::Point2>& reference = std::nullopt);

}  // namespace heatplan::plan
