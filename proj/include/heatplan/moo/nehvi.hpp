#pragma once

// Monte Carlo noisy expected hypervolume improvement with common random
// numbers, and its maximization over the unit box.

#include "heatplan/gp/model.hpp"
#include "heatplan/moo/pareto.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace heatplan::moo {

struct AcquisitionValue {
    double mean{0.0};
    double std_error{0.0};
};

/// Both models live in standardized objective space on unit-box inputs.
/// Joint samples over the observed points are drawn once at construction;
/// the value at a new x is sampled conditionally on them, so every x sees
/// the same sampled fronts.
class Nehvi {
public:
    Nehvi(std::array<const gp::GpModel*, 2> models, const gp::Matrix& observed, const Point2& r, int n_samples,
          std::uint64_t seed);

    [[nodiscard]] double operator()(const gp::Vector& x) const { return evaluate(x).mean; }
    [[nodiscard]] AcquisitionValue evaluate(const gp::Vector& x) const;
    /// Sum of both posterior variances at x, for the exploration fallback.
    [[nodiscard]] double total_variance(const gp::Vector& x) const;
    [[nodiscard]] int samples() const { return n_samples_; }
    [[nodiscard]] Eigen::Index dims() const { return observed_.cols(); }
    [[nodiscard]] const std::vector<std::vector<Point2>>& sampled_fronts() const { return fronts_; }

private:
    struct PerObjective {
        const gp::GpModel* model{nullptr};
        gp::Matrix v_obs;    // L^-1 k(train, observed)
        // Posterior covariance at the observed points as V diag(lambda) V';
        // only directions with lambda above the roundoff floor are kept.
        gp::Matrix root_obs;  // V_+ sqrt(lambda_+), observed x rank
        gp::Matrix whiten;    // diag(1 / sqrt(lambda_+)) V_+', rank x observed
        double floor{0.0};    // variances below this count as zero
        gp::Vector mean_obs;
        gp::Matrix z_obs;    // samples x observed
        gp::Vector z_new;    // samples
    };
    /// Conditional mean and sample offsets at x for one objective.
    void sample_at(const PerObjective& o, const gp::Vector& x, gp::Vector& out) const;

    gp::Matrix observed_;
    Point2 r_;
    int n_samples_;
    std::array<PerObjective, 2> obj_;
    std::vector<std::vector<Point2>> fronts_;
};

struct PatternSearchOptions {
    double initial_step{0.1};
    double min_step{1e-4};
    int max_evaluations{400};  // per start
};

struct AcquisitionResult {
    gp::Vector x;
    double value{0.0};
    /// The acquisition was zero at every point tried; x is the max-variance
    /// quasi-random point instead.
    bool exploration_fallback{false};
    int evaluations{0};
    /// Value at every start point, in order (quasi-random starts first).
    std::vector<double> start_values;
};

/// Multi-start pattern search over [0, 1]^d from `restarts` scrambled Halton
/// points plus one perturbation of each incumbent.
[[nodiscard]] AcquisitionResult optimize_acquisition(const Nehvi& acq, const std::vector<gp::Vector>& incumbents,
                                                     int restarts, std::uint64_t seed,
                                                     const PatternSearchOptions& options = {});

}  // namespace heatplan::moo
