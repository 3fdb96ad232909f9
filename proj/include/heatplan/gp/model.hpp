#pragma once

// Exact GP regression with Gaussian noise on normalized inputs.

#include "heatplan/gp/kernel.hpp"

#include <cstdint>
#include <optional>

namespace heatplan::gp {

/// Jitter escalation used for every Cholesky: none, then 1e-10 ... 1e-4.
struct Factorization {
    Eigen::LLT<Matrix> llt;
    double jitter{0.0};
};
/// Throws std::runtime_error when the matrix stays indefinite at 1e-4 jitter.
[[nodiscard]] Factorization factorize_with_jitter(const Matrix& K);

struct SurrogatePosterior {
    Vector mean;
    Matrix cov;
};

class GpModel {
public:
    GpModel() = default;
    /// X rows are inputs; factorizes K + noise_std^2 I immediately.
    GpModel(Matrix X, Vector y, KernelParams params, double noise_std);

    [[nodiscard]] const Matrix& inputs() const { return X_; }
    [[nodiscard]] const Vector& targets() const { return y_; }
    [[nodiscard]] const KernelParams& params() const { return params_; }
    [[nodiscard]] double noise_std() const { return noise_; }
    [[nodiscard]] double jitter() const { return fac_.jitter; }
    [[nodiscard]] const Eigen::LLT<Matrix>& factor() const { return fac_.llt; }
    [[nodiscard]] Eigen::Index size() const { return X_.rows(); }
    /// K + noise^2 I + jitter I as factorized.
    [[nodiscard]] Matrix noisy_kernel() const;
    /// (K + noise^2 I)^-1 y
    [[nodiscard]] const Vector& alpha() const { return alpha_; }

    /// -1/2 y^T K_n^-1 y - 1/2 log|K_n| - n/2 log(2 pi)
    [[nodiscard]] double log_marginal_likelihood() const;
    /// d MLL / d noise_std^2 = 1/2 (alpha^T alpha - tr K_n^-1)
    [[nodiscard]] double noise_variance_gradient() const;
    /// d MLL / d log sigma followed by d MLL / d log l_i.
    [[nodiscard]] Vector hyper_gradient() const;

    [[nodiscard]] SurrogatePosterior posterior(const Matrix& queries) const;
    [[nodiscard]] Vector posterior_mean(const Matrix& queries) const;
    [[nodiscard]] Vector posterior_variance(const Matrix& queries) const;
    /// Latent posterior variance at the training inputs in the cancellation-free
    /// form s (1 - s [K_n^-1]_ii), s = noise^2 + jitter.
    [[nodiscard]] Vector training_posterior_variance() const;
    /// Posterior mean at the training inputs as y - s alpha, which stays
    /// accurate when K_n is badly conditioned.
    [[nodiscard]] Vector training_posterior_mean() const;
    /// Posterior covariance between two query sets.
    [[nodiscard]] Matrix posterior_cross(const Matrix& A, const Matrix& B) const;

    /// n_samples x queries joint draws, deterministic per seed.
    [[nodiscard]] Matrix sample_posterior(const Matrix& queries, int n_samples, std::uint64_t seed) const;

private:
    Matrix X_;
    Vector y_;
    KernelParams params_;
    double noise_{0.0};
    Factorization fac_;
    Vector alpha_;
};

/// Standard-normal matrix from a seeded engine, used for all MC draws.
[[nodiscard]] Matrix standard_normals(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

}  // namespace heatplan::gp
