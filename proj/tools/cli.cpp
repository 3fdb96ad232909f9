#include "cli.hpp"

#include "heatplan/plan/config.hpp"
#include "heatplan/plan/run.hpp"
#include "heatplan/scenario/io.hpp"
#include "heatplan/synth/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace heatplan::cli {

namespace fs = std::filesystem;
using plan::InputError;

namespace {

std::optional<moo::Point2> parse_reference(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::stringstream ss(s);
    moo::Point2 r{};
    char comma = 0;
    if (!(ss >> r[0] >> comma >> r[1]) || comma != ',' || !(ss >> std::ws).eof())
        throw InputError("--reference expects two comma-separated numbers, got '" + s + "'");
    if (!std::isfinite(r[0]) || !std::isfinite(r[1])) throw InputError("--reference must be finite");
    return r;
}

std::string selection_report(const scenario::SeasonData& season,
                             const std::vector<scenario::TypicalScenario>& scenarios) {
    const auto months = season.months();
    std::ostringstream out;
    out << std::setprecision(12);
    if (season.synthetic) out << "# synthetic data\n";
    out << "month,weight,medoid_date,selected_date,series,source_date,a,b,adjusted,target_mean,target_var,warning\n";
    auto date_of = [&](const std::string& month, std::size_t pos) -> std::string {
        for (const auto& [m, idx] : months)
            if (m == month && pos < idx.size()) return season.days[idx[pos]].date;
        return "?";
    };
    for (const auto& sc : scenarios)
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& s = sc.series[k];
            std::string warn = s.warning.empty() ? sc.warning : s.warning;
            for (char& c : warn)
                if (c == ',' || c == '\n') c = ';';
            out << sc.month << "," << sc.day.weight << "," << date_of(sc.month, sc.medoid_index) << ","
                << date_of(sc.month, sc.selected_index) << "," << scenario::series_name(scenario::kAllSeries[k]) << ","
                << date_of(sc.month, s.source_index) << "," << s.a << "," << s.b << "," << (s.adjusted ? 1 : 0) << ","
                << s.target.mean << "," << s.target.var << "," << warn << "\n";
        }
    return out.str();
}

int cmd_scenarios(const std::string& input, const std::string& output, const std::string& selection,
                  std::ostream& out) {
    const auto mode = plan::parse_selection(selection);
    scenario::SeasonData season;
    try {
        season = scenario::read_season_csv(input);
    } catch (const std::exception& e) {
        throw InputError(input + ": " + e.what());
    }
    const auto scenarios = scenario::generate_typical_scenarios(season, {mode, true});
    fs::path bundle(output);
    if (bundle.has_parent_path()) fs::create_directories(bundle.parent_path());
    plan::write_atomic(bundle.string(), scenario::bundle_to_json(scenarios, season.synthetic));
    fs::path report = bundle;
    report.replace_extension(".selection.csv");
    plan::write_atomic(report.string(), selection_report(season, scenarios));
    out << "wrote " << scenarios.size() << " typical days to " << bundle.string() << " (selection report "
        << report.string() << ")" << (season.synthetic ? " [synthetic]" : "") << "\n";
    return 0;
}

int cmd_plan(const std::string& config_path, const std::string& algorithm, int budget, std::optional<std::uint64_t> seed,
             const std::string& out_dir, const std::string& reference, std::ostream& out) {
    plan::PlanConfig cfg = plan::load_plan_config(config_path);
    if (!algorithm.empty()) cfg.algorithm = plan::parse_algorithm(algorithm);
    if (budget > 0) cfg.budget = budget;
    if (seed) cfg.seed = *seed;
    if (auto r = parse_reference(reference)) cfg.reference = r;
    cfg.validate();
    const auto s = plan::run_plan(cfg, out_dir);
    out << plan::to_string(cfg.algorithm) << ": " << s.evaluations << " evaluations, " << s.front_size
        << " front members, written to " << s.out_dir << "\n";
    return 0;
}

int cmd_benchmark(const std::string& run_dir, const std::string& season, const std::string& config,
                  std::ostream& out) {
    const auto s = plan::benchmark_run(run_dir, season, config);
    const auto& e = s.errors;
    out << std::setprecision(6) << "SAA over " << s.schemes << " schemes\n"
        << "  posterior mean error: cost " << 100.0 * e.posterior_cost << "%, RES " << 100.0 * e.posterior_res << "%\n"
        << "  raw observation error: cost " << 100.0 * e.raw_cost << "%, RES " << 100.0 * e.raw_res << "%\n";
    if (!s.saa_failed.empty()) out << "  " << s.saa_failed.size() << " schemes without an SAA value\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out_dir, const std::string& reference,
               std::ostream& out) {
    const auto s = plan::report_runs(runs, out_dir, parse_reference(reference));
    out << std::setprecision(10) << "reference " << s.reference[0] << "," << s.reference[1] << "\n";
    for (const auto& r : s.runs)
        out << "  " << r.algorithm << " " << r.label << ": front " << r.front.size() << ", hypervolume "
            << r.front_hypervolume << "\n";
    return 0;
}

int cmd_synth(const std::string& scale_name, std::uint64_t seed, int days, const std::string& out_dir,
              std::ostream& out) {
    synth::Scale scale;
    try {
        scale = synth::parse_scale(scale_name);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    auto spec = synth::season_spec(scale, seed);
    if (days > 0) spec.days = days;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const auto season = synth::generate_season(spec);
    fs::create_directories(out_dir);
    std::ostringstream csv;
    scenario::write_season_csv(csv, season);
    plan::write_atomic((fs::path(out_dir) / "season.csv").string(), csv.str());
    nlohmann::json cfg;
    cfg["system"] = {{"preset", synth::to_string(scale)}, {"seed", seed}};
    cfg["scenario"] = {{"season", "season.csv"}};
    cfg["seed"] = seed;
    plan::write_atomic((fs::path(out_dir) / "config.json").string(), cfg.dump(2) + "\n");
    out << "wrote " << season.days.size() << " synthetic days and a " << synth::to_string(scale)
        << " system config to " << out_dir << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Capacity planning for electric-heat coupled systems"};
    app.require_subcommand(1);

    std::string input, output, selection = "joint";
    auto* scen = app.add_subcommand("scenarios", "typical days from an hourly season file");
    scen->add_option("--input", input, "season CSV")->required();
    scen->add_option("--out", output, "bundle JSON to write")->required();
    scen->add_option("--selection", selection, "joint | independent");

    std::string config, algorithm, out_dir, reference;
    int budget = 0;
    std::uint64_t seed_value = 0;
    auto* planc = app.add_subcommand("plan", "run an optimizer and write a run directory");
    planc->add_option("--config", config, "config JSON")->required();
    planc->add_option("--algorithm", algorithm, "ambo | nsga2 | random (overrides config)");
    planc->add_option("--budget", budget, "objective evaluations (overrides config)");
    auto* seed_opt = planc->add_option("--seed", seed_value, "seed (overrides config)");
    planc->add_option("--out", out_dir, "run directory")->required();
    planc->add_option("--reference", reference, "fixed trace reference 'cost,neg_res'");

    std::string run_dir, season, bench_config;
    auto* bench = app.add_subcommand("benchmark", "SAA values and estimator errors for a run");
    bench->add_option("--run", run_dir, "run directory")->required();
    bench->add_option("--season", season, "season CSV")->required();
    bench->add_option("--config", bench_config, "config JSON (default: the run's snapshot)");

    std::vector<std::string> runs;
    std::string report_out, report_ref;
    auto* rep = app.add_subcommand("report", "merge runs into plot-ready tables");
    rep->add_option("runs", runs, "run directories")->required();
    rep->add_option("--out", report_out, "output directory")->required();
    rep->add_option("--reference", report_ref, "shared reference 'cost,neg_res'");

    std::string scale = "small", synth_out;
    std::uint64_t synth_seed = 0;
    int days = 0;
    auto* syn = app.add_subcommand("synth", "synthetic season and system config");
    syn->add_option("--scale", scale, "small | large");
    syn->add_option("--seed", synth_seed, "seed");
    syn->add_option("--days", days, "season length (default 180)");
    syn->add_option("--out", synth_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*scen) return cmd_scenarios(input, output, selection, out);
        if (*planc)
            return cmd_plan(config, algorithm, budget,
                            seed_opt->count() ? std::optional<std::uint64_t>(seed_value) : std::nullopt, out_dir,
                            reference, out);
        if (*bench) return cmd_benchmark(run_dir, season, bench_config, out);
        if (*rep) return cmd_report(runs, report_out, report_ref, out);
        if (*syn) return cmd_synth(scale, synth_seed, days, synth_out, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace heatplan::cli
