#pragma once

// Comparison optimizers sharing the moo evaluator and observation types.

#include "heatplan/moo/ambo.hpp"

#include <cstdint>
#include <vector>

namespace heatplan::baselines {

struct Nsga2Config {
    int population{12};
    int generations{5};  // the initial population counts as generation 1
    double crossover_prob{0.9};
    double crossover_eta{15.0};
    double mutation_prob{0.0};  // 0: 1 / dimension
    double mutation_eta{20.0};
    std::uint64_t seed{0};

    void validate() const;
    [[nodiscard]] int budget() const { return population * generations; }
};

struct Individual {
    gp::Vector x;
    moo::Point2 y{0.0, 0.0};
    std::size_t evaluation{0};  // index into the evaluation list
    int rank{0};
    double crowding{0.0};
};

struct Nsga2Result {
    std::vector<moo::Observation> evaluations;  // in call order
    std::vector<Individual> population;         // final, sorted by rank then crowding
    /// Indices into population of the rank-0 members.
    std::vector<std::size_t> front;
    /// Raw-observation front of each generation's population.
    std::vector<std::vector<moo::Point2>> generation_fronts;

    [[nodiscard]] std::vector<moo::Point2> observed_points() const;
};

[[nodiscard]] Nsga2Result nsga2_run(const moo::Evaluator& evaluate, const gp::InputScaler& bounds,
                                    const Nsga2Config& cfg);

/// Fast non-dominated sorting: rank of every point (0 = first front).
[[nodiscard]] std::vector<int> nondominated_ranks(const std::vector<moo::Point2>& pts);
/// Crowding distance within one front (boundary points infinite).
[[nodiscard]] std::vector<double> crowding_distance(const std::vector<moo::Point2>& front);

struct RandomSearchResult {
    std::vector<moo::Observation> evaluations;
    std::vector<std::size_t> front;  // indices into evaluations, raw-observation front

    [[nodiscard]] std::vector<moo::Point2> observed_points() const;
};

/// Scrambled Halton points over the box; the first k points of a run with
/// budget n are the whole run with budget k.
[[nodiscard]] RandomSearchResult random_search(const moo::Evaluator& evaluate, const gp::InputScaler& bounds,
                                               int budget, std::uint64_t seed);

}  // namespace heatplan::baselines
