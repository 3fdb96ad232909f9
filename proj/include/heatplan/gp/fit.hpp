#pragma once

// Maximum-likelihood kernel fitting and gradient-ascent noise estimation.

#include "heatplan/gp/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace heatplan::gp {

struct FitOptions {
    std::optional<KernelParams> init;  // extra start (e.g. previous iteration's params)
    std::vector<Smoothness> nus{Smoothness::half, Smoothness::three_halves, Smoothness::five_halves};
    int random_starts{2};  // per smoothness, in addition to the default and init starts
    std::uint64_t seed{0};
    int max_iterations{100};
    double sigma_min{1e-3}, sigma_max{1e2};
    double lengthscale_min{1e-2}, lengthscale_max{1e2};
};

struct FitResult {
    KernelParams params;
    double mll{0.0};
    /// MLL at every start that factorized, in the order tried.
    std::vector<double> start_mll;
    int failed_starts{0};
};

/// Multi-start projected BFGS over (log sigma, log l) for every smoothness in
/// options.nus, at fixed noise. Throws std::runtime_error when no start factorizes.
[[nodiscard]] FitResult fit_hyperparameters(const Matrix& X, const Vector& y, double noise_std,
                                            const FitOptions& options = {});

struct NoiseOptions {
    double learning_rate{1e-2};
    double tolerance{1e-6};
    double initial_std{0.1};
    double floor{1e-6};
    int max_iterations{500};
};

struct NoiseEstimate {
    double noise_std{0.0};
    double mll{0.0};
    int iterations{0};
    bool converged{false};
    std::string warning;
};

/// Gradient ascent of the MLL in log(noise_std^2) with step growth on
/// success and halving on failure.
[[nodiscard]] NoiseEstimate estimate_noise_std(const Matrix& X, const Vector& y, const KernelParams& params,
                                               const NoiseOptions& options = {});

}  // namespace heatplan::gp
