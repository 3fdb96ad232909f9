#pragma once

// Adaptive multi-objective Bayesian optimization loop.

#include "heatplan/gp/surrogate.hpp"
#include "heatplan/moo/nehvi.hpp"
#include "heatplan/moo/pareto.hpp"

#include <functional>
#include <string>
#include <vector>

namespace heatplan::moo {

/// Maps a raw decision vector to its (noisy) objective pair. May throw.
using Evaluator = std::function<Point2(const gp::Vector&)>;

struct AmboConfig {
    int n_initial{0};  // 0: 2 * dims + 2
    int iterations{30};
    int n_samples{128};
    int restarts{8};
    std::uint64_t seed{0};
    gp::SurrogateOptions surrogate;
    PatternSearchOptions search;

    void validate() const;
};

struct Observation {
    gp::Vector x;  // raw units
    Point2 y{0.0, 0.0};
    int iteration{0};  // 0 for the initial design
    bool failed{false};
    std::string error;
};

struct IterationRecord {
    int iteration{0};
    gp::Vector candidate;
    Point2 observed{0.0, 0.0};
    bool failed{false};
    double acquisition{0.0};
    bool exploration_fallback{false};
    ReferencePoint reference;      // standardized units
    Point2 noise_std{0.0, 0.0};    // raw units
    Point2 noise_std_standard{0.0, 0.0};
    std::array<std::string, 2> smoothness;
    double hypervolume{0.0};       // standardized observation front vs reference
};

struct FrontMember {
    std::size_t index{0};  // into observations
    gp::Vector x;
    Point2 mean{0.0, 0.0};           // raw posterior mean
    Point2 std{0.0, 0.0};            // raw latent posterior std
    Point2 predictive_std{0.0, 0.0}; // raw std of a fresh observation (adds the noise)
    Point2 mean_standard{0.0, 0.0};
    Point2 observed{0.0, 0.0};
};

struct AmboResult {
    std::vector<Observation> observations;
    std::vector<IterationRecord> log;
    /// Non-dominated posterior means at the observed schemes.
    std::vector<FrontMember> front;
    Point2 target_mean{0.0, 0.0}, target_std{1.0, 1.0};  // final standardization

    [[nodiscard]] std::vector<Point2> observed_points() const;
    [[nodiscard]] std::vector<Point2> front_means() const;
};

/// Called once per finished iteration, in order.
using IterationObserver = std::function<void(const IterationRecord&)>;

/// Deterministic per cfg.seed. Throws std::runtime_error when every
/// initial evaluation fails.
[[nodiscard]] AmboResult ambo_run(const Evaluator& evaluate, const gp::InputScaler& bounds, const AmboConfig& cfg,
                                  const IterationObserver& observe = {});

/// Hypervolume of the raw observation front after each evaluation.
[[nodiscard]] std::vector<double> hypervolume_trace(const AmboResult& run, const Point2& r);

/// Surrogates for both objectives fitted from scratch on a data set, seeded
/// the way the final fit of a run is.
[[nodiscard]] std::array<gp::Surrogate, 2> fit_surrogates(const std::vector<Observation>& obs,
                                                          const gp::InputScaler& bounds,
                                                          const gp::SurrogateOptions& options, std::uint64_t seed);

/// Posterior-mean front of a data set under freshly fitted surrogates.
[[nodiscard]] std::vector<FrontMember> posterior_mean_front(const std::vector<Observation>& obs,
                                                            const std::array<gp::Surrogate, 2>& models);

/// Calls the evaluator, turning exceptions and non-finite values into a
/// failed observation with NaN objectives.
[[nodiscard]] Observation evaluate_observation(const Evaluator& evaluate, const gp::Vector& x, int iteration);

/// Replaces the objectives of failed observations that have none yet with
/// worst successful value + max(range, 10% of |worst|, 1), per objective.
void assign_penalties(std::vector<Observation>& obs);

/// Seed for an independent stream derived from a base seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace heatplan::moo
