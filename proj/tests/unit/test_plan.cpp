#include "cli.hpp"
#include "heatplan/plan/config.hpp"
#include "heatplan/plan/run.hpp"
#include "heatplan/scenario/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace heatplan;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("heatplan_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct CliResult {
    int code;
    std::string out, err;
};

CliResult hp(std::vector<std::string> args) {
    args.insert(args.begin(), "heatplan");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Two-month synthetic season and a config pointing at it.
fs::path small_case(const std::string& name, int days = 56) {
    const auto dir = scratch(name);
    const auto r = hp({"synth", "--out", (dir / "data").string(), "--seed", "3", "--days", std::to_string(days)});
    REQUIRE(r.code == 0);
    return dir;
}

}  // namespace

TEST_CASE("hash and atomic writes") {
    CHECK(plan::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(plan::fnv1a_hex("a") == "af63dc4c8601ec8c");
    const auto dir = scratch("atomic");
    const auto p = (dir / "x.txt").string();
    plan::write_atomic(p, "one");
    plan::write_atomic(p, "two");
    CHECK(slurp(p) == "two");
    CHECK(!fs::exists(p + ".tmp"));
}

TEST_CASE("config defaults, overrides and rejection") {
    const auto cfg = plan::parse_plan_config(json::object(), ".");
    CHECK(cfg.algorithm == plan::Algorithm::ambo);
    CHECK(cfg.budget == 60);
    CHECK(cfg.nsga2.population == 12);
    CHECK(cfg.ambo.n_samples == 128);
    CHECK(cfg.system.chp.size() == 2);
    CHECK(cfg.system.chp[0].cost[0] == doctest::Approx(1.03));
    CHECK(cfg.scenario.kind == plan::ScenarioSource::Kind::synthetic);

    const json j = {{"system", {{"preset", "small"}, {"limits", {{"pump_rated", {0.0}}}}, {"interest_rate", 0.07}}},
                    {"algorithm", "nsga2"},
                    {"ambo", {{"surrogate", {{"fit", {{"nus", {"5/2"}}}}}}}}};
    const auto o = plan::parse_plan_config(j, ".");
    CHECK(o.system.interest_rate == doctest::Approx(0.07));
    CHECK(o.system.limits.pump_rated == std::vector<double>{0.0});
    CHECK(o.system.limits.eb_rated == std::vector<double>{40.0});
    CHECK(o.ambo.surrogate.fit.nus.size() == 1);
    CHECK(o.algorithm == plan::Algorithm::nsga2);

    CHECK_THROWS_AS((void)plan::parse_plan_config(json{{"budjet", 5}}, "."), plan::InputError);
    CHECK_THROWS_AS((void)plan::parse_plan_config(json{{"system", {{"preset", "small"}, {"boiler", {{"eff", 1}}}}}}, "."),
                    plan::InputError);
    CHECK_THROWS_AS((void)plan::parse_plan_config(json{{"algorithm", "pbo"}}, "."), plan::InputError);
    CHECK_THROWS_AS((void)plan::parse_plan_config(json{{"budget", "many"}}, "."), plan::InputError);
    CHECK_THROWS_AS((void)plan::parse_plan_config(json{{"scenario", {{"bundle", "a"}, {"season", "b"}}}}, "."),
                    plan::InputError);

    // The expanded snapshot parses back to itself.
    const std::string once = plan::to_json(o).dump();
    const std::string twice = plan::to_json(plan::parse_plan_config(json::parse(once), ".")).dump();
    CHECK(once == twice);
}

TEST_CASE("scheme codec") {
    auto cfg = synth::generate_system(synth::Scale::small);
    cfg.limits.tes_capacity = {0.0};
    const plan::SchemeCodec codec(cfg);
    REQUIRE(codec.dims() == 3);
    CHECK(codec.names() == std::vector<std::string>{"eb_rated[0]", "pump_rated[0]", "csh_capacity[0]"});
    gp::Vector x(3);
    x << 12.0, 20.0, -1.0;  // pump above its limit, csh below zero
    const auto s = codec.decode(x);
    CHECK(s.eb_rated[0] == 12.0);
    CHECK(s.pump_rated[0] == cfg.limits.pump_rated[0]);
    CHECK(s.tes_capacity[0] == 0.0);
    CHECK(s.csh_capacity[0] == 0.0);
    s.validate(cfg);
    const gp::Vector back = codec.encode(s);
    CHECK(back(0) == 12.0);
    CHECK(back(1) == cfg.limits.pump_rated[0]);
    const auto b = codec.bounds();
    CHECK(b.upper(2) == cfg.limits.csh_capacity[0]);
}

TEST_CASE("budget split and reference") {
    plan::PlanConfig cfg;
    const auto a = plan::plan_budget(cfg, 4);
    CHECK(a.n_initial == 10);
    CHECK(a.iterations == 50);
    cfg.algorithm = plan::Algorithm::nsga2;
    cfg.nsga2.generations = 0;
    const auto n = plan::plan_budget(cfg, 4);
    CHECK(n.population == 12);
    CHECK(n.generations == 5);
    cfg.algorithm = plan::Algorithm::ambo;
    cfg.budget = 8;
    CHECK_THROWS_AS((void)plan::plan_budget(cfg, 4), plan::InputError);

    const auto r = plan::default_reference({{0.0, 10.0}, {4.0, 2.0}, {std::nan(""), 100.0}});
    CHECK(r[0] == doctest::Approx(4.4));
    CHECK(r[1] == doctest::Approx(10.8));
}

TEST_CASE("storage-heavy scheme that once stalled the solver dispatches cleanly") {
    // Adaptive rho kept retuning on the first typical day of this season;
    // the day was counted infeasible and the penalty tripled the cost.
    auto cfg = plan::parse_plan_config(nlohmann::json::object(), ".");
    cfg.scenario.synthetic = synth::season_spec(synth::Scale::small, 1);
    const auto loaded = plan::load_scenarios(cfg.scenario);
    const plan::SchemeCodec codec(cfg.system);
    gp::Vector x(4);
    x << 22.695312499999993, 9.350260416666664, 200.0, 100.0;
    const auto r = dispatch::simulate_day(cfg.system, codec.decode(x), loaded.days.front(), cfg.solver);
    CHECK(r.feasible);
}

TEST_CASE("cli scenarios") {
    const auto dir = small_case("scenarios", 181);
    const auto season = (dir / "data" / "season.csv").string();
    auto r = hp({"scenarios", "--input", season, "--out", (dir / "bundle.json").string()});
    REQUIRE(r.code == 0);
    bool synthetic = false;
    const auto bundle = scenario::bundle_from_json(slurp(dir / "bundle.json"), &synthetic);
    CHECK(bundle.size() == 6);
    CHECK(synthetic);
    const std::string report = slurp(dir / "bundle.selection.csv");
    CHECK(report.find("# synthetic") == 0);
    CHECK(report.find("2024-04") != std::string::npos);

    r = hp({"scenarios", "--input", season, "--out", (dir / "ind.json").string(), "--selection", "independent"});
    CHECK(r.code == 0);
    const auto ind = scenario::bundle_from_json(slurp(dir / "ind.json"));
    bool distinct = false;
    for (const auto& s : ind)
        for (const auto& a : s.series)
            if (a.source_index != s.series[0].source_index) distinct = true;
    CHECK(distinct);

    write_file(dir / "bad.csv", "timestamp,electric_load_mw,heat_load_mw,wind_mw\n2023-11-01 00:00,1,2,3\n");
    r = hp({"scenarios", "--input", (dir / "bad.csv").string(), "--out", (dir / "x.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("pv_mw") != std::string::npos);

    r = hp({"scenarios", "--input", season, "--out", (dir / "x.json").string(), "--selection", "both"});
    CHECK(r.code == 2);
    r = hp({"scenarios", "--out", (dir / "x.json").string()});
    CHECK(r.code == 2);
}

TEST_CASE("cli plan, benchmark and report") {
    const auto dir = small_case("plan");
    const auto config = (dir / "data" / "config.json").string();
    const auto season = (dir / "data" / "season.csv").string();

    auto r = hp({"plan", "--config", config, "--algorithm", "nsga2", "--budget", "12", "--out", (dir / "nsga").string()});
    REQUIRE(r.code == 0);
    const json m = json::parse(slurp(dir / "nsga" / "manifest.json"));
    CHECK(m["population"] == 12);
    CHECK(m["status"] == "complete");
    CHECK(m["config_hash"] == plan::fnv1a_hex(slurp(dir / "nsga" / "config.json")));
    for (const auto& a : m["artifacts"]) CHECK(fs::exists(dir / "nsga" / a.get<std::string>()));

    r = hp({"plan", "--config", config, "--algorithm", "random", "--budget", "12", "--seed", "5", "--out",
             (dir / "rand").string()});
    REQUIRE(r.code == 0);
    std::ifstream log(dir / "rand" / "log.jsonl");
    int lines = 0;
    for (std::string line; std::getline(log, line);) ++lines;
    CHECK(lines == 12);

    r = hp({"plan", "--config", config, "--budget", "12", "--out", (dir / "ambo").string()});
    REQUIRE(r.code == 0);
    const json front = json::parse(slurp(dir / "ambo" / "front.json"));
    CHECK(front["provenance"] == "posterior_mean");
    CHECK(front["synthetic"] == true);
    CHECK(!front["members"].empty());

    // Report: one table with an algorithm column, shared reference in the header.
    r = hp({"report", (dir / "nsga").string(), (dir / "rand").string(), (dir / "ambo").string(), "--out",
             (dir / "report").string()});
    REQUIRE(r.code == 0);
    const std::string fronts = slurp(dir / "report" / "fronts.csv");
    CHECK(fronts.rfind("# reference: ", 0) == 0);
    CHECK(fronts.find("nsga2,nsga,") != std::string::npos);
    CHECK(fronts.find("random,rand,") != std::string::npos);
    std::istringstream traces(slurp(dir / "report" / "traces.csv"));
    std::string line, prev_run;
    double prev = -1.0;
    while (std::getline(traces, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("algorithm", 0) == 0) continue;
        std::stringstream ls(line);
        std::string algo, run, ev, hv;
        std::getline(ls, algo, ',');
        std::getline(ls, run, ',');
        std::getline(ls, ev, ',');
        std::getline(ls, hv, ',');
        const double v = std::stod(hv);
        if (run == prev_run) CHECK(v >= prev);
        prev_run = run;
        prev = v;
    }
    r = hp({"report", (dir / "rand").string(), "--out", (dir / "report2").string(), "--reference", "1e9,0"});
    CHECK(r.code == 0);
    CHECK(slurp(dir / "report2" / "fronts.csv").rfind("# reference: 1000000000,0", 0) == 0);

    // A run on a different system cannot share the table.
    json other = json::parse(slurp(config));
    other["system"]["interest_rate"] = 0.08;
    write_file(dir / "data" / "other.json", other.dump());
    r = hp({"plan", "--config", (dir / "data" / "other.json").string(), "--algorithm", "random", "--budget", "3",
             "--out", (dir / "other").string()});
    REQUIRE(r.code == 0);
    r = hp({"report", (dir / "rand").string(), (dir / "other").string(), "--out", (dir / "report3").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("incompatible") != std::string::npos);

    // Benchmark: one SAA pair per evaluated scheme plus the four error scalars.
    r = hp({"benchmark", "--run", (dir / "rand").string(), "--season", season});
    REQUIRE(r.code == 0);
    std::istringstream saa(slurp(dir / "rand" / "saa.csv"));
    int rows = 0;
    while (std::getline(saa, line))
        if (!line.empty() && line[0] != '#' && line.rfind("evaluation", 0) != 0) ++rows;
    CHECK(rows == 12);
    const json rep = json::parse(slurp(dir / "rand" / "error_report.json"));
    for (const char* k : {"posterior_mean", "raw_observation"}) {
        CHECK(rep[k]["annual_cost"].get<double>() >= 0.0);
        CHECK(rep[k]["res"].get<double>() >= 0.0);
    }
    CHECK(rep["synthetic"] == true);

    r = hp({"benchmark", "--run", (dir / "rand").string(), "--season", (dir / "missing.csv").string()});
    CHECK(r.code != 0);
    r = hp({"benchmark", "--run", (dir / "rand").string()});
    CHECK(r.code != 0);
}

TEST_CASE("cli plan input failures") {
    const auto dir = small_case("planfail");
    write_file(dir / "bad.json", "{\"budget\": 60, \"bogus\": 1}");
    auto r = hp({"plan", "--config", (dir / "bad.json").string(), "--out", (dir / "x").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("bogus") != std::string::npos);
    r = hp({"plan", "--config", (dir / "nothere.json").string(), "--out", (dir / "x").string()});
    CHECK(r.code == 2);
    r = hp({"plan", "--config", (dir / "data" / "config.json").string(), "--budget", "5", "--out",
             (dir / "x").string()});
    CHECK(r.code == 2);
    r = hp({"plan", "--config", (dir / "data" / "config.json").string(), "--reference", "1,2,3", "--out",
             (dir / "x").string()});
    CHECK(r.code == 2);
    r = hp({"frobnicate"});
    CHECK(r.code == 2);
}

TEST_CASE("plan runs are reproducible") {
    const auto dir = small_case("repro");
    const auto config = (dir / "data" / "config.json").string();
    for (const char* out : {"a", "b"})
        REQUIRE(hp({"plan", "--config", config, "--budget", "12", "--out", (dir / out).string()}).code == 0);
    for (const char* f : {"log.jsonl", "iterations.jsonl", "front.json", "trace.csv", "config.json", "scenarios.json"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
}
