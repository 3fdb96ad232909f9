#include "heatplan/moo/ambo.hpp"

#include "heatplan/moo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace heatplan::moo {

void AmboConfig::validate() const {
    if (n_initial < 0) throw std::invalid_argument("initial sample count must be non-negative");
    if (iterations < 0) throw std::invalid_argument("iteration count must be non-negative");
    if (n_samples < 1) throw std::invalid_argument("NEHVI sample count must be at least 1");
    if (restarts < 1) throw std::invalid_argument("acquisition restarts must be at least 1");
}

std::vector<Point2> AmboResult::observed_points() const {
    std::vector<Point2> out;
    for (const auto& o : observations) out.push_back(o.y);
    return out;
}

std::vector<Point2> AmboResult::front_means() const {
    std::vector<Point2> out;
    for (const auto& f : front) out.push_back(f.mean);
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 of the combined value
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Failed evaluations get the worst successful value plus a full range (at
// least 1) so they sit clearly behind every real observation.
void assign_penalties(std::vector<Observation>& obs) {
    Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 hi{-lo[0], -lo[1]};
    bool any = false;
    for (const auto& o : obs) {
        if (o.failed) continue;
        any = true;
        for (int k = 0; k < 2; ++k) lo[k] = std::min(lo[k], o.y[k]), hi[k] = std::max(hi[k], o.y[k]);
    }
    if (!any) return;
    for (auto& o : obs) {
        if (!o.failed || std::isfinite(o.y[0])) continue;
        for (int k = 0; k < 2; ++k) o.y[k] = hi[k] + std::max({hi[k] - lo[k], 0.1 * std::abs(hi[k]), 1.0});
    }
}

Observation evaluate_observation(const Evaluator& evaluate, const gp::Vector& x, int iteration) {
    Observation o;
    o.x = x;
    o.iteration = iteration;
    try {
        o.y = evaluate(x);
        if (!std::isfinite(o.y[0]) || !std::isfinite(o.y[1])) throw std::runtime_error("evaluator returned a non-finite objective");
    } catch (const std::exception& e) {
        o.failed = true;
        o.error = e.what();
        o.y = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    }
    return o;
}

namespace {

struct Data {
    gp::Matrix X;  // raw
    std::array<gp::Vector, 2> y;
};

Data collect(const std::vector<Observation>& obs, Eigen::Index dims) {
    Data d;
    const auto n = static_cast<Eigen::Index>(obs.size());
    d.X.resize(n, dims);
    d.y[0].resize(n);
    d.y[1].resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.X.row(i) = obs[i].x.transpose();
        d.y[0](i) = obs[i].y[0];
        d.y[1](i) = obs[i].y[1];
    }
    return d;
}

std::array<gp::Surrogate, 2> fit_models(const Data& d, const gp::InputScaler& bounds, const AmboConfig& cfg,
                                        std::array<std::optional<gp::KernelParams>, 2>& warm, std::uint64_t seed) {
    std::array<gp::Surrogate, 2> out;
    for (int k = 0; k < 2; ++k) {
        gp::SurrogateOptions so = cfg.surrogate;
        so.fit.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
        if (warm[k]) so.fit.init = warm[k];
        out[k] = gp::Surrogate::fit(d.X, d.y[k], bounds, so);
        warm[k] = out[k].model().params();
    }
    return out;
}

}  // namespace

std::array<gp::Surrogate, 2> fit_surrogates(const std::vector<Observation>& obs, const gp::InputScaler& bounds,
                                            const gp::SurrogateOptions& options, std::uint64_t seed) {
    if (obs.empty()) throw std::invalid_argument("no observations to fit");
    AmboConfig cfg;
    cfg.surrogate = options;
    std::array<std::optional<gp::KernelParams>, 2> warm;
    return fit_models(collect(obs, static_cast<Eigen::Index>(bounds.dims())), bounds, cfg, warm, seed);
}

std::vector<FrontMember> posterior_mean_front(const std::vector<Observation>& obs,
                                              const std::array<gp::Surrogate, 2>& models) {
    if (obs.empty()) return {};
    for (const auto& m : models)
        if (static_cast<std::size_t>(m.model().size()) != obs.size())
            throw std::invalid_argument("surrogates were not fitted on these observations");
    // Observed schemes are the training inputs; see training_posterior_mean.
    std::array<gp::Vector, 2> raw, std_;
    for (int k = 0; k < 2; ++k) {
        std_[k] = models[k].model().training_posterior_mean();
        raw[k] = models[k].targets().to_raw(std_[k]);
    }
    std::vector<Point2> means(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) means[i] = {raw[0](i), raw[1](i)};
    std::vector<FrontMember> front;
    for (std::size_t i : pareto_filter(means)) {
        FrontMember m;
        m.index = i;
        m.x = obs[i].x;
        m.mean = means[i];
        const auto ii = static_cast<Eigen::Index>(i);
        for (int k = 0; k < 2; ++k) {
            // Observed schemes are the training inputs, where the direct
            // formula cancels badly at small noise.
            const double var = models[k].model().training_posterior_variance()(ii);
            const auto& gm = models[k].model();
            const double noise_var = gm.noise_std() * gm.noise_std() + gm.jitter();
            m.std[k] = std::sqrt(var) * models[k].targets().std;
            m.predictive_std[k] = std::sqrt(var + noise_var) * models[k].targets().std;
            m.mean_standard[k] = std_[k](ii);
        }
        m.observed = obs[i].y;
        front.push_back(std::move(m));
    }
    return front;
}

AmboResult ambo_run(const Evaluator& evaluate, const gp::InputScaler& bounds, const AmboConfig& cfg,
                    const IterationObserver& observe) {
    cfg.validate();
    const auto dims = static_cast<int>(bounds.dims());
    if (dims < 1) throw std::invalid_argument("search space needs at least one dimension");
    const int n0 = cfg.n_initial > 0 ? cfg.n_initial : 2 * dims + 2;

    AmboResult res;
    const gp::Matrix init = bounds.from_unit(scrambled_halton(n0, dims, derive_seed(cfg.seed, 1000)));
    for (int i = 0; i < n0; ++i) res.observations.push_back(evaluate_observation(evaluate, init.row(i).transpose(), 0));
    if (std::all_of(res.observations.begin(), res.observations.end(), [](const auto& o) { return o.failed; }))
        throw std::runtime_error("every initial evaluation failed: " + res.observations.front().error);
    assign_penalties(res.observations);

    std::array<std::optional<gp::KernelParams>, 2> warm;
    for (int j = 1; j <= cfg.iterations; ++j) {
        const Data d = collect(res.observations, dims);
        const auto models = fit_models(d, bounds, cfg, warm, derive_seed(cfg.seed, 2000 + j));

        IterationRecord rec;
        rec.iteration = j;
        std::vector<Point2> ystd(res.observations.size());
        const gp::Vector s0 = models[0].targets().to_standard(d.y[0]);
        const gp::Vector s1 = models[1].targets().to_standard(d.y[1]);
        for (std::size_t i = 0; i < ystd.size(); ++i) ystd[i] = {s0(i), s1(i)};
        rec.reference = adaptive_reference(ystd);
        rec.hypervolume = hypervolume(pareto_points(ystd), rec.reference.r);
        for (int k = 0; k < 2; ++k) {
            rec.noise_std[k] = models[k].noise_std_raw();
            rec.noise_std_standard[k] = models[k].noise_std();
            rec.smoothness[k] = gp::to_string(models[k].model().params().nu);
        }

        const gp::Matrix Xu = bounds.to_unit(d.X);
        const Nehvi acq({&models[0].model(), &models[1].model()}, Xu, rec.reference.r, cfg.n_samples,
                        derive_seed(cfg.seed, 3000 + j));
        std::vector<gp::Vector> incumbents;
        for (std::size_t i : pareto_filter(ystd)) incumbents.push_back(Xu.row(static_cast<Eigen::Index>(i)).transpose());
        const auto best = optimize_acquisition(acq, incumbents, cfg.restarts, derive_seed(cfg.seed, 4000 + j), cfg.search);
        rec.acquisition = best.value;
        rec.exploration_fallback = best.exploration_fallback;

        const gp::Matrix cand = bounds.from_unit(best.x.transpose());
        rec.candidate = cand.row(0).transpose();
        res.observations.push_back(evaluate_observation(evaluate, rec.candidate, j));
        assign_penalties(res.observations);
        rec.failed = res.observations.back().failed;
        rec.observed = res.observations.back().y;
        if (observe) observe(rec);
        res.log.push_back(std::move(rec));
    }

    const Data d = collect(res.observations, dims);
    const auto models = fit_models(d, bounds, cfg, warm, derive_seed(cfg.seed, 5000));
    res.front = posterior_mean_front(res.observations, models);
    for (int k = 0; k < 2; ++k) {
        res.target_mean[k] = models[k].targets().mean;
        res.target_std[k] = models[k].targets().std;
    }
    return res;
}

std::vector<double> hypervolume_trace(const AmboResult& run, const Point2& r) {
    return hypervolume_trace(run.observed_points(), r);
}

}  // namespace heatplan::moo
