#include "heatplan/plan/run.hpp"

#include "heatplan/baselines/nsga2.hpp"
#include "heatplan/scenario/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace heatplan::plan {

using nlohmann::json;
namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

constexpr std::array<const char*, 4> kKinds{"eb_rated", "pump_rated", "tes_capacity", "csh_capacity"};

std::vector<double>& field(dispatch::CapacityScheme& s, std::size_t k) {
    switch (k) {
        case 0: return s.eb_rated;
        case 1: return s.pump_rated;
        case 2: return s.tes_capacity;
        default: return s.csh_capacity;
    }
}

const std::vector<double>& limit(const dispatch::SearchLimits& l, std::size_t k) {
    switch (k) {
        case 0: return l.eb_rated;
        case 1: return l.pump_rated;
        case 2: return l.tes_capacity;
        default: return l.csh_capacity;
    }
}

std::string num(double v) {
    if (!std::isfinite(v)) return "nan";
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

json vec_json(const gp::Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json pair_json(const moo::Point2& p) {
    json a = json::array();
    for (double v : p) a.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    return a;
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

moo::Point2 finite_or_nan(const moo::Point2& p, bool failed) {
    if (failed) return {std::nan(""), std::nan("")};
    return p;
}

}  // namespace

// ---- decision vector ----

SchemeCodec::SchemeCodec(const dispatch::SystemConfig& cfg) : zero_(dispatch::CapacityScheme::zero(cfg)) {
    for (std::size_t k = 0; k < kKinds.size(); ++k) {
        const auto& lim = limit(cfg.limits, k);
        for (std::size_t u = 0; u < lim.size(); ++u)
            if (lim[u] > 0.0) slots_.push_back({kKinds[k], u, lim[u]});
    }
}

gp::InputScaler SchemeCodec::bounds() const {
    gp::Vector lo = gp::Vector::Zero(static_cast<Eigen::Index>(slots_.size()));
    gp::Vector hi(lo.size());
    for (std::size_t i = 0; i < slots_.size(); ++i) hi(static_cast<Eigen::Index>(i)) = slots_[i].upper;
    return {lo, hi};
}

std::vector<std::string> SchemeCodec::names() const {
    std::vector<std::string> out;
    for (const auto& s : slots_) out.push_back(s.kind + "[" + std::to_string(s.unit) + "]");
    return out;
}

dispatch::CapacityScheme SchemeCodec::decode(const gp::Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != slots_.size())
        throw std::invalid_argument("decision vector has " + std::to_string(x.size()) + " entries, expected " +
                                    std::to_string(slots_.size()));
    dispatch::CapacityScheme s = zero_;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::find(kKinds.begin(), kKinds.end(), slots_[i].kind) - kKinds.begin());
        field(s, k)[slots_[i].unit] = std::clamp(x(static_cast<Eigen::Index>(i)), 0.0, slots_[i].upper);
    }
    return s;
}

gp::Vector SchemeCodec::encode(const dispatch::CapacityScheme& s) const {
    gp::Vector x(static_cast<Eigen::Index>(slots_.size()));
    auto copy = s;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::find(kKinds.begin(), kKinds.end(), slots_[i].kind) - kKinds.begin());
        x(static_cast<Eigen::Index>(i)) = field(copy, k).at(slots_[i].unit);
    }
    return x;
}

json scheme_to_json(const dispatch::CapacityScheme& s) {
    return {{"eb_rated", s.eb_rated}, {"pump_rated", s.pump_rated},
            {"tes_capacity", s.tes_capacity}, {"csh_capacity", s.csh_capacity}};
}

// ---- scenarios ----

LoadedScenarios load_scenarios(const ScenarioSource& src) {
    LoadedScenarios out;
    scenario::SeasonData season;
    switch (src.kind) {
        case ScenarioSource::Kind::bundle:
            try {
                out.scenarios = scenario::bundle_from_json(read_text(src.path), &out.synthetic);
            } catch (const InputError&) {
                throw;
            } catch (const std::exception& e) {
                throw InputError(src.path + ": " + e.what());
            }
            out.days = scenario::typical_days(out.scenarios);
            return out;
        case ScenarioSource::Kind::season:
            try {
                season = scenario::read_season_csv(src.path);
                season.validate();
            } catch (const std::exception& e) {
                throw InputError(src.path + ": " + e.what());
            }
            break;
        case ScenarioSource::Kind::synthetic:
            season = synth::generate_season(src.synthetic);
            break;
    }
    out.synthetic = season.synthetic;
    out.scenarios = scenario::generate_typical_scenarios(season, {src.selection, src.adjust});
    out.days = scenario::typical_days(out.scenarios);
    return out;
}

// ---- evaluation ----

DispatchEvaluator::DispatchEvaluator(const dispatch::SystemConfig& cfg, std::vector<dispatch::TypicalDay> days,
                                     double penalty_factor, const solver::SolverSettings& settings)
    : cfg_(cfg), days_(std::move(days)), codec_(cfg), policy_(penalty_factor) {
    options_.solver = settings;
}

moo::Point2 DispatchEvaluator::operator()(const gp::Vector& x) {
    EvaluationRecord rec;
    rec.index = records_.size();
    rec.x = x;
    try {
        rec.scheme = codec_.decode(x);
        const auto ev = dispatch::evaluate_scheme(cfg_, rec.scheme, days_, &policy_, options_);
        rec.objectives = ev.objectives;
        rec.investment = ev.investment;
        rec.infeasible_days = ev.infeasible_days;
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    records_.push_back(rec);
    if (on_record) on_record(records_.back());
    if (rec.failed) throw std::runtime_error(rec.error);
    return {rec.objectives.annual_cost, rec.objectives.neg_res_consumed};
}

moo::Evaluator DispatchEvaluator::as_evaluator() {
    return [this](const gp::Vector& x) { return (*this)(x); };
}

// ---- runs ----

BudgetPlan plan_budget(const PlanConfig& cfg, std::size_t dims) {
    BudgetPlan b;
    switch (cfg.algorithm) {
        case Algorithm::ambo:
            b.n_initial = cfg.ambo.n_initial > 0 ? cfg.ambo.n_initial : 2 * static_cast<int>(dims) + 2;
            if (cfg.budget < b.n_initial)
                throw InputError("budget " + std::to_string(cfg.budget) + " is below the initial design size " +
                                 std::to_string(b.n_initial));
            b.iterations = cfg.budget - b.n_initial;
            b.total = cfg.budget;
            break;
        case Algorithm::nsga2:
            b.population = cfg.nsga2.population;
            b.generations = cfg.nsga2.generations > 0 ? cfg.nsga2.generations : cfg.budget / b.population;
            if (b.generations < 1)
                throw InputError("budget " + std::to_string(cfg.budget) + " is below one population of " +
                                 std::to_string(b.population));
            b.total = b.population * b.generations;
            break;
        case Algorithm::random:
            b.total = cfg.budget;
            break;
    }
    return b;
}

moo::Point2 default_reference(const std::vector<moo::Point2>& pts) {
    moo::Point2 r{};
    for (int k = 0; k < 2; ++k) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : pts) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
            lo = std::min(lo, p[k]);
            hi = std::max(hi, p[k]);
        }
        if (!std::isfinite(lo)) throw std::runtime_error("no finite objective values to place a reference point");
        const double span = std::max(hi - lo, 1e-6 * std::max(std::abs(hi), 1.0));
        r[k] = hi + 0.1 * span;
    }
    return r;
}

std::string objective_fingerprint(const dispatch::SystemConfig& cfg, const std::vector<dispatch::TypicalDay>& days) {
    json j = system_to_json(cfg);
    j.erase("limits");
    json d = json::array();
    for (const auto& day : days)
        d.push_back({day.electric_load, day.heat_load, day.wind_max, day.pv_max, day.weight});
    j["days"] = d;
    return fnv1a_hex(j.dump());
}

namespace {

struct FrontDoc {
    std::string provenance;
    moo::Point2 mean{0.0, 0.0}, std{1.0, 1.0};
    json members = json::array();
};

json front_document(const FrontDoc& f, const std::string& algorithm, bool synthetic,
                    const std::vector<std::string>& dims) {
    json j;
    j["algorithm"] = algorithm;
    j["provenance"] = f.provenance;
    j["synthetic"] = synthetic;
    j["objectives"] = {"annual_cost", "neg_res_consumed"};
    j["units"] = {"$/year", "-MWh/year"};
    j["dimensions"] = dims;
    j["standardization"] = {{"mean", pair_json(f.mean)}, {"std", pair_json(f.std)}};
    j["members"] = f.members;
    return j;
}

/// Observed-value front of a list of observations, standardized by the
/// z-score of all of them.
FrontDoc observed_front(const std::vector<moo::Observation>& obs, const std::vector<std::size_t>& members,
                        const SchemeCodec& codec) {
    FrontDoc f;
    f.provenance = "observed";
    for (int k = 0; k < 2; ++k) {
        gp::Vector y(static_cast<Eigen::Index>(obs.size()));
        for (std::size_t i = 0; i < obs.size(); ++i) y(static_cast<Eigen::Index>(i)) = obs[i].y[k];
        const auto ts = gp::TargetScaler::fit(y);
        f.mean[k] = ts.mean;
        f.std[k] = ts.std;
    }
    for (std::size_t i : members) {
        const auto& o = obs[i];
        const moo::Point2 z{(o.y[0] - f.mean[0]) / f.std[0], (o.y[1] - f.mean[1]) / f.std[1]};
        f.members.push_back({{"evaluation", i}, {"x", vec_json(o.x)}, {"scheme", scheme_to_json(codec.decode(o.x))},
                             {"raw", pair_json(o.y)}, {"standardized", pair_json(z)}, {"observed", pair_json(o.y)}});
    }
    return f;
}

std::string trace_csv(const std::vector<double>& trace, const moo::Point2& r, bool synthetic) {
    std::ostringstream out;
    out << "# reference: " << num(r[0]) << "," << num(r[1]) << "\n";
    if (synthetic) out << "# synthetic data\n";
    out << "evaluation,hypervolume\n";
    for (std::size_t i = 0; i < trace.size(); ++i) out << i + 1 << "," << num(trace[i]) << "\n";
    return out.str();
}

struct LogEntry {
    std::size_t index{0};
    gp::Vector x;
    bool failed{false};
    moo::Point2 y{0.0, 0.0};
    int infeasible_days{0};
};

std::vector<LogEntry> read_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::vector<LogEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            LogEntry e;
            e.index = j.at("evaluation").get<std::size_t>();
            const auto xs = j.at("x").get<std::vector<double>>();
            e.x = Eigen::Map<const gp::Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
            e.failed = j.at("failed").get<bool>();
            if (!e.failed) {
                e.y = {j.at("annual_cost").get<double>(), j.at("neg_res_consumed").get<double>()};
                e.infeasible_days = j.at("infeasible_days").get<int>();
            } else {
                e.y = {std::nan(""), std::nan("")};
            }
            out.push_back(std::move(e));
        } catch (const json::exception& e) {
            throw InputError(path + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

json read_manifest(const std::string& run_dir) {
    const std::string path = (fs::path(run_dir) / "manifest.json").string();
    if (!fs::exists(path)) throw InputError(run_dir + " is not a run directory (no manifest.json)");
    json m = read_json(path);
    if (m.value("status", std::string()) != "complete")
        throw InputError(run_dir + ": run did not complete (status " + m.value("status", std::string("?")) + ")");
    return m;
}

}  // namespace

PlanSummary run_plan(const PlanConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    auto path = [&](const char* name) { return (dir / name).string(); };

    json manifest;
    manifest["started"] = utc_timestamp();
    const std::string config_text = to_json(cfg).dump(2) + "\n";
    write_atomic(path("config.json"), config_text);
    manifest["config_hash"] = fnv1a_hex(config_text);
    manifest["seed"] = cfg.seed;
    manifest["algorithm"] = to_string(cfg.algorithm);
    manifest["budget"] = cfg.budget;
    std::vector<std::string> artifacts{"config.json"};

    auto finish_manifest = [&](const std::string& status, const std::string& error) {
        manifest["status"] = status;
        if (!error.empty()) manifest["error"] = error;
        manifest["finished"] = utc_timestamp();
        std::vector<std::string> present;
        for (const auto& a : artifacts)
            if (fs::exists(dir / a)) present.push_back(a);
        present.push_back("manifest.json");
        manifest["artifacts"] = present;
        write_atomic(path("manifest.json"), manifest.dump(2) + "\n");
    };

    std::ofstream log;
    std::ofstream iter_log;
    PlanSummary summary;
    summary.out_dir = out_dir;
    try {
        const LoadedScenarios loaded = load_scenarios(cfg.scenario);
        write_atomic(path("scenarios.json"), scenario::bundle_to_json(loaded.scenarios, loaded.synthetic));
        artifacts.push_back("scenarios.json");
        manifest["synthetic"] = loaded.synthetic;
        manifest["typical_days"] = loaded.days.size();
        manifest["objective_fingerprint"] = objective_fingerprint(cfg.system, loaded.days);

        DispatchEvaluator ev(cfg.system, loaded.days, cfg.penalty_factor, cfg.solver);
        const SchemeCodec& codec = ev.codec();
        if (codec.dims() == 0) throw InputError("no capacity to plan: every search limit is zero");
        manifest["dimensions"] = codec.names();
        const BudgetPlan b = plan_budget(cfg, codec.dims());
        manifest["evaluations_planned"] = b.total;

        log.open(path("log.jsonl"), std::ios::trunc);
        artifacts.push_back("log.jsonl");
        ev.on_record = [&](const EvaluationRecord& r) {
            json j;
            j["evaluation"] = r.index;
            if (cfg.algorithm == Algorithm::ambo)
                j["iteration"] = static_cast<int>(r.index) < b.n_initial
                                     ? 0
                                     : static_cast<int>(r.index) - b.n_initial + 1;
            if (cfg.algorithm == Algorithm::nsga2) j["generation"] = static_cast<int>(r.index) / b.population + 1;
            j["x"] = vec_json(r.x);
            j["scheme"] = scheme_to_json(r.scheme);
            j["failed"] = r.failed;
            if (r.failed) {
                j["error"] = r.error;
            } else {
                j["annual_cost"] = r.objectives.annual_cost;
                j["neg_res_consumed"] = r.objectives.neg_res_consumed;
                j["investment"] = r.investment;
                j["infeasible_days"] = r.infeasible_days;
            }
            log << j.dump() << "\n";
            log.flush();
        };

        std::vector<moo::Observation> obs;
        FrontDoc front;
        const auto bounds = codec.bounds();
        switch (cfg.algorithm) {
            case Algorithm::ambo: {
                moo::AmboConfig a = cfg.ambo;
                a.n_initial = b.n_initial;
                a.iterations = b.iterations;
                a.seed = cfg.seed;
                manifest["n_initial"] = b.n_initial;
                manifest["iterations"] = b.iterations;
                manifest["n_samples"] = a.n_samples;
                iter_log.open(path("iterations.jsonl"), std::ios::trunc);
                artifacts.push_back("iterations.jsonl");
                const auto observe = [&](const moo::IterationRecord& r) {
                    json j;
                    j["iteration"] = r.iteration;
                    j["candidate"] = vec_json(r.candidate);
                    j["observed"] = pair_json(r.observed);
                    j["failed"] = r.failed;
                    j["acquisition"] = r.acquisition;
                    j["exploration_fallback"] = r.exploration_fallback;
                    j["reference"] = {{"r", pair_json(r.reference.r)}, {"fallback", r.reference.fallback}};
                    j["noise_std"] = pair_json(r.noise_std);
                    j["noise_std_standard"] = pair_json(r.noise_std_standard);
                    j["smoothness"] = r.smoothness;
                    j["hypervolume"] = r.hypervolume;
                    iter_log << j.dump() << "\n";
                    iter_log.flush();
                };
                const auto res = moo::ambo_run(ev.as_evaluator(), bounds, a, observe);
                obs = res.observations;
                front.provenance = "posterior_mean";
                front.mean = res.target_mean;
                front.std = res.target_std;
                for (const auto& m : res.front)
                    front.members.push_back({{"evaluation", m.index},
                                             {"x", vec_json(m.x)},
                                             {"scheme", scheme_to_json(codec.decode(m.x))},
                                             {"raw", pair_json(m.mean)},
                                             {"standardized", pair_json(m.mean_standard)},
                                             {"std", pair_json(m.std)},
                                             {"predictive_std", pair_json(m.predictive_std)},
                                             {"observed", pair_json(m.observed)}});
                break;
            }
            case Algorithm::nsga2: {
                baselines::Nsga2Config n = cfg.nsga2;
                n.generations = b.generations;
                n.seed = cfg.seed;
                manifest["population"] = n.population;
                manifest["generations"] = n.generations;
                const auto res = baselines::nsga2_run(ev.as_evaluator(), bounds, n);
                obs = res.evaluations;
                std::vector<std::size_t> members;
                for (std::size_t i : res.front) members.push_back(res.population[i].evaluation);
                std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t c) {
                    return obs[a].y[0] < obs[c].y[0] || (obs[a].y[0] == obs[c].y[0] && a < c);
                });
                front = observed_front(obs, members, codec);
                break;
            }
            case Algorithm::random: {
                const auto res = baselines::random_search(ev.as_evaluator(), bounds, b.total, cfg.seed);
                obs = res.evaluations;
                front = observed_front(obs, res.front, codec);
                break;
            }
        }
        log.close();
        if (iter_log.is_open()) iter_log.close();

        write_atomic(path("front.json"),
                     front_document(front, to_string(cfg.algorithm), loaded.synthetic, codec.names()).dump(2) + "\n");
        artifacts.push_back("front.json");

        std::vector<moo::Point2> pts;
        for (const auto& o : obs) pts.push_back(finite_or_nan(o.y, o.failed));
        std::vector<moo::Point2> with_front = pts;
        for (const auto& m : front.members) with_front.push_back(m.at("raw").get<moo::Point2>());
        const moo::Point2 r = cfg.reference ? *cfg.reference : default_reference(with_front);
        write_atomic(path("trace.csv"), trace_csv(moo::hypervolume_trace(pts, r), r, loaded.synthetic));
        artifacts.push_back("trace.csv");
        manifest["reference"] = pair_json(r);
        manifest["evaluations"] = obs.size();
        manifest["failed_evaluations"] =
            std::count_if(obs.begin(), obs.end(), [](const moo::Observation& o) { return o.failed; });
        manifest["front_size"] = front.members.size();

        summary.evaluations = static_cast<int>(obs.size());
        summary.front_size = front.members.size();
        summary.reference = r;
    } catch (const std::exception& e) {
        if (log.is_open()) log.close();
        if (iter_log.is_open()) iter_log.close();
        finish_manifest("failed", e.what());
        throw;
    }
    finish_manifest("complete", "");
    summary.artifacts = manifest["artifacts"].get<std::vector<std::string>>();
    return summary;
}

BenchmarkSummary benchmark_run(const std::string& run_dir, const std::string& season_path,
                               const std::string& config_override) {
    const fs::path dir(run_dir);
    json manifest = read_manifest(run_dir);
    const PlanConfig cfg =
        load_plan_config(config_override.empty() ? (dir / "config.json").string() : config_override);
    const auto entries = read_log((dir / "log.jsonl").string());
    if (entries.size() < 2) throw InputError(run_dir + ": need at least two evaluations to benchmark");

    scenario::SeasonData season;
    if (season_path.empty()) throw InputError("benchmark needs a season file");
    try {
        season = scenario::read_season_csv(season_path);
        season.validate();
    } catch (const std::exception& e) {
        throw InputError(season_path + ": " + e.what());
    }

    const SchemeCodec codec(cfg.system);
    std::vector<moo::Observation> obs;
    for (const auto& e : entries) {
        if (static_cast<std::size_t>(e.x.size()) != codec.dims())
            throw InputError(run_dir + ": logged decision vectors do not match the configured system");
        moo::Observation o;
        o.x = e.x;
        o.y = e.y;
        o.failed = e.failed;
        obs.push_back(std::move(o));
    }
    moo::assign_penalties(obs);
    const auto models = moo::fit_surrogates(obs, codec.bounds(), cfg.ambo.surrogate, moo::derive_seed(cfg.seed, 5000));
    gp::Matrix X(static_cast<Eigen::Index>(obs.size()), static_cast<Eigen::Index>(codec.dims()));
    for (std::size_t i = 0; i < obs.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = obs[i].x.transpose();
    const auto post_cost = models[0].posterior_raw(X);
    const auto post_res = models[1].posterior_raw(X);

    BenchmarkSummary out;
    std::vector<dispatch::ObjectivePair> mu, raw, saa;
    std::vector<std::size_t> which;
    std::ostringstream csv;
    if (season.synthetic || manifest.value("synthetic", false)) csv << "# synthetic data\n";
    csv << "evaluation,saa_annual_cost,saa_neg_res_consumed,raw_annual_cost,raw_neg_res_consumed,"
           "posterior_annual_cost,posterior_neg_res_consumed,saa_infeasible_days,status\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const auto ii = static_cast<Eigen::Index>(i);
        std::string status = "ok";
        baselines::SaaResult s;
        bool have = false;
        if (e.failed) {
            status = "evaluation_failed";
        } else {
            try {
                s = baselines::saa_benchmark(cfg.system, codec.decode(e.x), season, cfg.solver);
                have = true;
            } catch (const std::exception& ex) {
                status = "saa_failed";
                out.saa_failed.push_back(e.index);
            }
        }
        if (have) {
            mu.push_back({post_cost.mean(ii), post_res.mean(ii)});
            raw.push_back({e.y[0], e.y[1]});
            saa.push_back(s.objectives);
            which.push_back(e.index);
        }
        csv << e.index << "," << (have ? num(s.objectives.annual_cost) : "nan") << ","
            << (have ? num(s.objectives.neg_res_consumed) : "nan") << "," << num(e.y[0]) << "," << num(e.y[1]) << ","
            << num(post_cost.mean(ii)) << "," << num(post_res.mean(ii)) << "," << (have ? s.infeasible_days : 0) << ","
            << status << "\n";
    }
    if (saa.empty()) throw std::runtime_error("no scheme had a usable SAA value");
    out.errors = baselines::error_metrics(mu, raw, saa);
    out.schemes = saa.size();

    auto map_idx = [&](const std::vector<std::size_t>& v) {
        std::vector<std::size_t> r;
        for (std::size_t k : v) r.push_back(which[k]);
        return r;
    };
    json rep;
    rep["synthetic"] = season.synthetic || manifest.value("synthetic", false);
    rep["season_days"] = season.days.size();
    rep["schemes"] = out.schemes;
    rep["posterior_mean"] = {{"annual_cost", out.errors.posterior_cost}, {"res", out.errors.posterior_res}};
    rep["raw_observation"] = {{"annual_cost", out.errors.raw_cost}, {"res", out.errors.raw_res}};
    rep["schemes_cost"] = out.errors.schemes_cost;
    rep["schemes_res"] = out.errors.schemes_res;
    rep["excluded_cost"] = map_idx(out.errors.excluded_cost);
    rep["excluded_res"] = map_idx(out.errors.excluded_res);
    rep["saa_failed"] = out.saa_failed;
    rep["note"] = "mean relative error against SAA; posterior_mean uses surrogates refitted on the run's observations";

    write_atomic((dir / "saa.csv").string(), csv.str());
    write_atomic((dir / "error_report.json").string(), rep.dump(2) + "\n");
    auto arts = manifest.value("artifacts", std::vector<std::string>{});
    for (const char* a : {"saa.csv", "error_report.json"})
        if (std::find(arts.begin(), arts.end(), a) == arts.end()) arts.push_back(a);
    manifest["artifacts"] = arts;
    manifest["benchmark"] = {{"season", fs::absolute(season_path).string()},
                             {"season_hash", fnv1a_hex(read_text(season_path))},
                             {"finished", utc_timestamp()}};
    write_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return out;
}

ReportSummary report_runs(const std::vector<std::string>& run_dirs, const std::string& out_dir,
                          const std::optional<moo::Point2>& reference) {
    if (run_dirs.empty()) throw InputError("report needs at least one run directory");
    struct Loaded {
        std::string label, algorithm, provenance;
        std::vector<moo::Point2> points;  // NaN for failed evaluations
        std::vector<moo::Point2> front;
        std::vector<std::size_t> front_eval;
    };
    std::vector<Loaded> runs;
    std::string fingerprint;
    bool synthetic = false;
    for (const auto& d : run_dirs) {
        const json m = read_manifest(d);
        const std::string fp = m.value("objective_fingerprint", std::string());
        if (fingerprint.empty()) fingerprint = fp;
        else if (fp != fingerprint)
            throw InputError("runs have incompatible objective scalings: " + run_dirs.front() + " and " + d +
                             " were evaluated on different systems or scenario days");
        synthetic = synthetic || m.value("synthetic", false);
        Loaded l;
        fs::path p(d);
        if (p.filename().empty()) p = p.parent_path();
        l.label = p.filename().string();
        l.algorithm = m.value("algorithm", std::string("?"));
        for (const auto& e : read_log((p / "log.jsonl").string())) l.points.push_back(e.y);
        const json f = read_json((p / "front.json").string());
        l.provenance = f.value("provenance", std::string("?"));
        for (const auto& mem : f.at("members")) {
            l.front.push_back(mem.at("raw").get<moo::Point2>());
            l.front_eval.push_back(mem.at("evaluation").get<std::size_t>());
        }
        runs.push_back(std::move(l));
    }

    ReportSummary out;
    if (reference) {
        out.reference = *reference;
    } else {
        std::vector<moo::Point2> all;
        for (const auto& l : runs) {
            all.insert(all.end(), l.points.begin(), l.points.end());
            all.insert(all.end(), l.front.begin(), l.front.end());
        }
        out.reference = default_reference(all);
    }
    const auto& r = out.reference;

    std::ostringstream head;
    head << "# reference: " << num(r[0]) << "," << num(r[1]) << "\n";
    if (synthetic) head << "# synthetic data\n";
    std::ostringstream fronts, traces, summary;
    fronts << head.str() << "algorithm,run,member,evaluation,annual_cost,neg_res_consumed,provenance\n";
    traces << head.str() << "algorithm,run,evaluation,hypervolume\n";
    summary << head.str() << "algorithm,run,evaluations,front_size,front_hypervolume,observed_hypervolume\n";
    for (const auto& l : runs) {
        ReportRun rr;
        rr.label = l.label;
        rr.algorithm = l.algorithm;
        rr.front = l.front;
        rr.front_hypervolume = moo::hypervolume(moo::pareto_points(l.front), r);
        rr.trace = moo::hypervolume_trace(l.points, r);
        for (std::size_t i = 0; i < l.front.size(); ++i)
            fronts << l.algorithm << "," << l.label << "," << i << "," << l.front_eval[i] << "," << num(l.front[i][0])
                   << "," << num(l.front[i][1]) << "," << l.provenance << "\n";
        for (std::size_t i = 0; i < rr.trace.size(); ++i)
            traces << l.algorithm << "," << l.label << "," << i + 1 << "," << num(rr.trace[i]) << "\n";
        summary << l.algorithm << "," << l.label << "," << l.points.size() << "," << l.front.size() << ","
                << num(rr.front_hypervolume) << "," << num(rr.trace.empty() ? 0.0 : rr.trace.back()) << "\n";
        out.runs.push_back(std::move(rr));
    }

    fs::create_directories(out_dir);
    const fs::path od(out_dir);
    write_atomic((od / "fronts.csv").string(), fronts.str());
    write_atomic((od / "traces.csv").string(), traces.str());
    write_atomic((od / "summary.csv").string(), summary.str());
    json rep;
    rep["reference"] = pair_json(r);
    rep["reference_source"] = reference ? "given" : "derived";
    rep["synthetic"] = synthetic;
    rep["objective_fingerprint"] = fingerprint;
    rep["runs"] = run_dirs;
    rep["artifacts"] = {"fronts.csv", "traces.csv", "summary.csv"};
    write_atomic((od / "report.json").string(), rep.dump(2) + "\n");
    return out;
}

}  // namespace heatplan::plan
