#pragma once

// One objective's surrogate: raw inputs mapped to the unit box, raw targets
// z-scored, kernel and noise fitted by alternating rounds.

#include "heatplan/gp/fit.hpp"

#include <string>

namespace heatplan::gp {

/// Affine map of the search box [lower, upper] onto [0, 1]^d.
struct InputScaler {
    Vector lower, upper;

    InputScaler() = default;
    InputScaler(Vector lo, Vector hi);
    [[nodiscard]] Matrix to_unit(const Matrix& raw) const;  // rows are points
    [[nodiscard]] Matrix from_unit(const Matrix& unit) const;
    [[nodiscard]] Eigen::Index dims() const { return lower.size(); }
};

/// z-score; a zero spread keeps std = 1 so constant data maps to zeros.
struct TargetScaler {
    double mean{0.0}, std{1.0};

    [[nodiscard]] static TargetScaler fit(const Vector& y);
    [[nodiscard]] Vector to_standard(const Vector& y) const { return (y.array() - mean) / std; }
    [[nodiscard]] Vector to_raw(const Vector& z) const { return z.array() * std + mean; }
};

struct SurrogateOptions {
    FitOptions fit;
    NoiseOptions noise;
    int rounds{2};              // fit kernel -> estimate noise, repeated
    bool estimate_noise{true};  // false: keep noise.initial_std fixed
};

class Surrogate {
public:
    Surrogate() = default;

    /// Throws std::invalid_argument on shape mismatch or fewer than two points.
    [[nodiscard]] static Surrogate fit(const Matrix& X_raw, const Vector& y_raw, const InputScaler& inputs,
                                       const SurrogateOptions& options = {});

    [[nodiscard]] const GpModel& model() const { return model_; }
    [[nodiscard]] const InputScaler& inputs() const { return inputs_; }
    [[nodiscard]] const TargetScaler& targets() const { return targets_; }
    /// Noise std in standardized units.
    [[nodiscard]] double noise_std() const { return model_.noise_std(); }
    [[nodiscard]] double noise_std_raw() const { return model_.noise_std() * targets_.std; }
    [[nodiscard]] const std::string& warning() const { return warning_; }

    /// Posterior of the standardized objective at raw query points.
    [[nodiscard]] SurrogatePosterior posterior_standard(const Matrix& queries_raw) const;
    /// Same posterior mapped back to raw units.
    [[nodiscard]] SurrogatePosterior posterior_raw(const Matrix& queries_raw) const;

private:
    GpModel model_;
    InputScaler inputs_;
    TargetScaler targets_;
    std::string warning_;
};

}  // namespace heatplan::gp
