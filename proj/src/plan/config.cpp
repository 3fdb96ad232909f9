#include "heatplan/plan/config.hpp"

#include <concepts>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace heatplan::plan {

using nlohmann::json;
namespace fs = std::filesystem;

Algorithm parse_algorithm(const std::string& s) {
    if (s == "ambo") return Algorithm::ambo;
    if (s == "nsga2") return Algorithm::nsga2;
    if (s == "random") return Algorithm::random;
    throw InputError("algorithm must be ambo, nsga2 or random, got '" + s + "'");
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::ambo: return "ambo";
        case Algorithm::nsga2: return "nsga2";
        case Algorithm::random: return "random";
    }
    return "?";
}

scenario::SelectionMode parse_selection(const std::string& s) {
    if (s == "joint") return scenario::SelectionMode::joint;
    if (s == "independent") return scenario::SelectionMode::independent;
    throw InputError("selection must be joint or independent, got '" + s + "'");
}

std::string to_string(scenario::SelectionMode m) {
    return m == scenario::SelectionMode::joint ? "joint" : "independent";
}

namespace {

// Field lists, shared by the reader and the writer below.

template <class V> void visit(V& v, dispatch::ThermalGenerator& g) {
    v("name", g.name); v("cost", g.cost); v("p_min", g.p_min); v("p_max", g.p_max); v("ramp", g.ramp);
}
template <class V> void visit(V& v, dispatch::ChpGenerator& g) {
    v("name", g.name); v("cost", g.cost);
    v("c_vcd", g.c_vcd); v("c_m", g.c_m); v("c_cab", g.c_cab); v("c_k", g.c_k);
    v("p_min", g.p_min); v("p_max", g.p_max); v("h_min", g.h_min); v("h_max", g.h_max); v("ramp", g.ramp);
}
template <class V> void visit(V& v, dispatch::HeatNetwork& n) {
    v("loss", n.loss); v("delay", n.delay); v("e_min", n.e_min); v("e_max", n.e_max);
}
template <class V> void visit(V& v, dispatch::Economics& e) {
    v("unit_price", e.unit_price); v("lifetime", e.lifetime); v("om_rate", e.om_rate);
}
template <class V> void visit(V& v, dispatch::BoilerSpec& b) { v("economics", b.economics); v("efficiency", b.efficiency); }
template <class V> void visit(V& v, dispatch::PumpSpec& p) { v("economics", p.economics); v("cop", p.cop); }
template <class V> void visit(V& v, dispatch::StorageSpec& s) {
    v("economics", s.economics); v("self_discharge", s.self_discharge); v("aux_power", s.aux_power);
    v("charge_rate", s.charge_rate); v("discharge_rate", s.discharge_rate);
}
template <class V> void visit(V& v, dispatch::CshSpec& c) { v("storage", c.storage); v("conversion", c.conversion); }
template <class V> void visit(V& v, dispatch::SearchLimits& l) {
    v("eb_rated", l.eb_rated); v("pump_rated", l.pump_rated);
    v("tes_capacity", l.tes_capacity); v("csh_capacity", l.csh_capacity);
}
template <class V> void visit(V& v, dispatch::SystemConfig& c) {
    v("thermal", c.thermal); v("chp", c.chp); v("network", c.network);
    v("eb_operating_price", c.eb_operating_price); v("csh_operating_price", c.csh_operating_price);
    v("boiler", c.boiler); v("pump", c.pump); v("tes", c.tes); v("csh", c.csh);
    v("interest_rate", c.interest_rate); v("wind_capacity", c.wind_capacity); v("pv_capacity", c.pv_capacity);
    v("tie_break", c.tie_break); v("limits", c.limits);
}
template <class V> void visit(V& v, synth::SynthSpec& s) {
    v("days", s.days); v("start_date", s.start_date);
    v("peak_electric_mw", s.peak_electric_mw); v("peak_heat_mw", s.peak_heat_mw);
    v("wind_capacity_mw", s.wind_capacity_mw); v("pv_capacity_mw", s.pv_capacity_mw); v("seed", s.seed);
    v("base_level", s.base_level); v("morning_peak", s.morning_peak); v("evening_peak", s.evening_peak);
    v("weekend_factor", s.weekend_factor);
    v("mean_temperature", s.mean_temperature); v("seasonal_swing", s.seasonal_swing);
    v("diurnal_swing", s.diurnal_swing); v("heat_at_zero_c", s.heat_at_zero_c); v("heat_per_degree", s.heat_per_degree);
    v("wind_mean", s.wind_mean); v("sunrise_hour", s.sunrise_hour); v("sunset_hour", s.sunset_hour);
    v("load_noise", s.load_noise); v("heat_noise", s.heat_noise); v("temperature_noise", s.temperature_noise);
    v("wind_volatility", s.wind_volatility); v("cloud_noise", s.cloud_noise);
}
template <class V> void visit(V& v, gp::FitOptions& f) {
    v("nus", f.nus); v("random_starts", f.random_starts); v("max_iterations", f.max_iterations);
    v("sigma_min", f.sigma_min); v("sigma_max", f.sigma_max);
    v("lengthscale_min", f.lengthscale_min); v("lengthscale_max", f.lengthscale_max);
}
template <class V> void visit(V& v, gp::NoiseOptions& n) {
    v("learning_rate", n.learning_rate); v("tolerance", n.tolerance); v("initial_std", n.initial_std);
    v("floor", n.floor); v("max_iterations", n.max_iterations);
}
template <class V> void visit(V& v, gp::SurrogateOptions& s) {
    v("fit", s.fit); v("noise", s.noise); v("rounds", s.rounds); v("estimate_noise", s.estimate_noise);
}
template <class V> void visit(V& v, moo::PatternSearchOptions& p) {
    v("initial_step", p.initial_step); v("min_step", p.min_step); v("max_evaluations", p.max_evaluations);
}
template <class V> void visit(V& v, moo::AmboConfig& a) {
    v("n_initial", a.n_initial); v("n_samples", a.n_samples); v("restarts", a.restarts);
    v("surrogate", a.surrogate); v("search", a.search);
}
template <class V> void visit(V& v, baselines::Nsga2Config& n) {
    v("population", n.population); v("generations", n.generations);
    v("crossover_prob", n.crossover_prob); v("crossover_eta", n.crossover_eta);
    v("mutation_prob", n.mutation_prob); v("mutation_eta", n.mutation_eta);
}
template <class V> void visit(V& v, solver::SolverSettings& s) {
    v("eps_abs", s.eps_abs); v("eps_rel", s.eps_rel); v("eps_prim_inf", s.eps_prim_inf);
    v("eps_dual_inf", s.eps_dual_inf); v("max_iter", s.max_iter); v("rho", s.rho); v("sigma", s.sigma);
    v("alpha", s.alpha); v("scaling_iters", s.scaling_iters); v("adaptive_rho", s.adaptive_rho);
    v("adaptive_rho_tolerance", s.adaptive_rho_tolerance); v("check_interval", s.check_interval);
    v("polish", s.polish); v("polish_trigger", s.polish_trigger);
    v("polish_refine_iters", s.polish_refine_iters); v("ridge", s.ridge);
}

struct Reader;
struct Writer;

template <class T>
concept Visitable = requires(Reader& r, T& t) { visit(r, t); };

template <class T> struct is_vector : std::false_type {};
template <class T> struct is_vector<std::vector<T>> : std::true_type {};

template <class T>
concept VisitableVector = is_vector<T>::value && Visitable<typename T::value_type>;

/// Reads present keys into the target, leaves defaults alone and rejects
/// keys it does not know.
struct Reader {
    const json& j;
    std::string where;
    std::set<std::string> used;

    Reader(const json& obj, std::string path) : j(obj), where(std::move(path)) {
        if (!j.is_object()) throw InputError(where + ": expected an object");
    }

    template <class T> void operator()(const char* key, T& out) {
        used.insert(key);
        if (!j.contains(key)) return;
        read(j.at(key), where + "." + key, out);
    }

    template <class T> static void read(const json& v, const std::string& path, T& out) {
        try {
            if constexpr (Visitable<T>) {
                Reader sub(v, path);
                visit(sub, out);
                sub.finish();
            } else if constexpr (std::same_as<T, std::vector<gp::Smoothness>>) {
                out.clear();
                for (const auto& s : v) out.push_back(gp::parse_smoothness(s.get<std::string>()));
            } else if constexpr (VisitableVector<T>) {
                if (!v.is_array()) throw InputError(path + ": expected an array");
                out.assign(v.size(), typename T::value_type{});
                for (std::size_t i = 0; i < v.size(); ++i) read(v[i], path + "[" + std::to_string(i) + "]", out[i]);
            } else if constexpr (std::same_as<T, std::optional<double>>) {
                if (v.is_null()) out.reset();
                else out = v.get<double>();
            } else {
                out = v.get<T>();
            }
        } catch (const json::exception& e) {
            throw InputError(path + ": " + e.what());
        } catch (const InputError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw InputError(path + ": " + e.what());
        }
    }

    void finish() const {
        for (const auto& [k, _] : j.items())
            if (!used.count(k)) throw InputError(where + ": unknown key '" + k + "'");
    }
};

struct Writer {
    json j = json::object();

    template <class T> void operator()(const char* key, const T& v) { j[key] = write(v); }

    template <class T> static json write(const T& v) {
        if constexpr (Visitable<T>) {
            Writer w;
            T copy = v;
            visit(w, copy);
            return w.j;
        } else if constexpr (std::same_as<T, std::vector<gp::Smoothness>>) {
            json a = json::array();
            for (auto s : v) a.push_back(gp::to_string(s));
            return a;
        } else if constexpr (VisitableVector<T>) {
            json a = json::array();
            for (const auto& x : v) a.push_back(write(x));
            return a;
        } else if constexpr (std::same_as<T, std::optional<double>>) {
            return v ? json(*v) : json(nullptr);
        } else {
            return json(v);
        }
    }
};

std::string resolve(const std::string& base_dir, const std::string& p) {
    fs::path path(p);
    if (path.is_relative()) path = fs::path(base_dir) / path;
    return fs::weakly_canonical(path).string();
}

json without(json j, std::initializer_list<const char*> keys) {
    for (const char* k : keys) j.erase(k);
    return j;
}

ScenarioSource parse_scenario(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw InputError("scenario: expected an object");
    ScenarioSource src;
    int kinds = 0;
    Reader r(j, "scenario");
    std::string sel = "joint";
    r("selection", sel);
    src.selection = parse_selection(sel);
    r("adjust", src.adjust);
    if (j.contains("bundle")) {
        ++kinds;
        src.kind = ScenarioSource::Kind::bundle;
        std::string p;
        r("bundle", p);
        src.path = resolve(base_dir, p);
    }
    if (j.contains("season")) {
        ++kinds;
        src.kind = ScenarioSource::Kind::season;
        std::string p;
        r("season", p);
        src.path = resolve(base_dir, p);
    }
    if (j.contains("synthetic")) {
        ++kinds;
        src.kind = ScenarioSource::Kind::synthetic;
        r.used.insert("synthetic");
        const json& s = j.at("synthetic");
        if (!s.is_object()) throw InputError("scenario.synthetic: expected an object");
        std::string scale = s.value("scale", std::string("small"));
        std::uint64_t seed = s.value("seed", std::uint64_t{0});
        try {
            src.synthetic = synth::season_spec(synth::parse_scale(scale), seed);
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("scenario.synthetic.scale: ") + e.what());
        }
        Reader::read(without(s, {"scale"}), "scenario.synthetic", src.synthetic);
    }
    r.finish();
    if (kinds == 0) {
        src.kind = ScenarioSource::Kind::synthetic;
        src.synthetic = synth::season_spec(synth::Scale::small, 0);
    }
    if (kinds > 1) throw InputError("scenario: give exactly one of bundle, season, synthetic");
    return src;
}

}  // namespace

json system_to_json(const dispatch::SystemConfig& cfg) { return Writer::write(cfg); }

dispatch::SystemConfig system_from_json(const json& j) {
    dispatch::SystemConfig cfg;
    if (j.is_object() && j.contains("preset")) {
        dispatch::SystemConfig base;
        try {
            base = synth::generate_system(synth::parse_scale(j.at("preset").get<std::string>()),
                                          j.value("seed", std::uint64_t{0}));
        } catch (const json::exception& e) {
            throw InputError(std::string("system.preset: ") + e.what());
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("system.preset: ") + e.what());
        }
        json merged = system_to_json(base);
        merged.merge_patch(without(j, {"preset", "seed"}));
        Reader::read(merged, "system", cfg);
    } else {
        Reader::read(j, "system", cfg);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("system: ") + e.what());
    }
    return cfg;
}

json synth_to_json(const synth::SynthSpec& spec) { return Writer::write(spec); }

void PlanConfig::validate() const {
    if (budget < 1) throw InputError("budget must be at least 1");
    if (!(penalty_factor > 0.0)) throw InputError("evaluation.penalty_factor must be positive");
    try {
        system.validate();
        if (scenario.kind == ScenarioSource::Kind::synthetic) scenario.synthetic.validate();
        moo::AmboConfig a = ambo;
        a.iterations = 0;
        a.validate();
        baselines::Nsga2Config n = nsga2;
        if (n.generations == 0) n.generations = 1;
        n.validate();
    } catch (const InputError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    if (reference)
        for (double v : *reference)
            if (!std::isfinite(v)) throw InputError("reference must be finite");
}

PlanConfig parse_plan_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw InputError("config: expected an object");
    PlanConfig cfg;
    Reader r(j, "config");
    r.used.insert("system");
    if (j.contains("system")) cfg.system = system_from_json(j.at("system"));
    else cfg.system = system_from_json(json{{"preset", "small"}});
    r.used.insert("scenario");
    cfg.scenario = parse_scenario(j.contains("scenario") ? j.at("scenario") : json::object(), base_dir);
    std::string algo = "ambo";
    r("algorithm", algo);
    cfg.algorithm = parse_algorithm(algo);
    r("budget", cfg.budget);
    r("seed", cfg.seed);
    r("ambo", cfg.ambo);
    cfg.nsga2.generations = 0;
    r("nsga2", cfg.nsga2);
    if (j.contains("evaluation")) {
        r.used.insert("evaluation");
        Reader e(j.at("evaluation"), "config.evaluation");
        e("penalty_factor", cfg.penalty_factor);
        e("solver", cfg.solver);
        e.finish();
    }
    if (j.contains("reference") && !j.at("reference").is_null()) {
        std::array<double, 2> ref{};
        r("reference", ref);
        cfg.reference = ref;
    } else {
        r.used.insert("reference");
    }
    r.finish();
    cfg.validate();
    return cfg;
}

PlanConfig load_plan_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    return parse_plan_config(j, fs::absolute(fs::path(path)).parent_path().string());
}

json to_json(const PlanConfig& cfg) {
    json j;
    j["system"] = system_to_json(cfg.system);
    json s;
    switch (cfg.scenario.kind) {
        case ScenarioSource::Kind::bundle: s["bundle"] = cfg.scenario.path; break;
        case ScenarioSource::Kind::season: s["season"] = cfg.scenario.path; break;
        case ScenarioSource::Kind::synthetic: s["synthetic"] = synth_to_json(cfg.scenario.synthetic); break;
    }
    s["selection"] = to_string(cfg.scenario.selection);
    s["adjust"] = cfg.scenario.adjust;
    j["scenario"] = s;
    j["algorithm"] = to_string(cfg.algorithm);
    j["budget"] = cfg.budget;
    j["seed"] = cfg.seed;
    j["ambo"] = Writer::write(cfg.ambo);
    j["nsga2"] = Writer::write(cfg.nsga2);
    j["evaluation"] = {{"penalty_factor", cfg.penalty_factor}, {"solver", Writer::write(cfg.solver)}};
    j["reference"] = cfg.reference ? json(*cfg.reference) : json(nullptr);
    return j;
}

}  // namespace heatplan::plan
