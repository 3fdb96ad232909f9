#include "heatplan/gp/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace heatplan::gp {

Factorization factorize_with_jitter(const Matrix& K) {
    Factorization f;
    f.llt.compute(K);
    if (f.llt.info() == Eigen::Success) return f;
    for (double jitter = 1e-10; jitter <= 1.0001e-4; jitter *= 10.0) {
        Matrix J = K;
        J.diagonal().array() += jitter;
        f.llt.compute(J);
        if (f.llt.info() == Eigen::Success) {
            f.jitter = jitter;
            return f;
        }
    }
    throw std::runtime_error("covariance matrix is not positive definite even with 1e-4 jitter");
}

GpModel::GpModel(Matrix X, Vector y, KernelParams params, double noise_std)
    : X_(std::move(X)), y_(std::move(y)), params_(std::move(params)), noise_(noise_std) {
    if (X_.rows() != y_.size()) throw std::invalid_argument("GP inputs and targets differ in count");
    if (X_.rows() == 0) throw std::invalid_argument("GP needs at least one observation");
    if (!(noise_ >= 0.0)) throw std::invalid_argument("noise std must be non-negative");
    params_.validate(X_.cols());
    Matrix K = kernel_matrix(X_, X_, params_);
    K.diagonal().array() += noise_ * noise_;
    fac_ = factorize_with_jitter(K);
    alpha_ = fac_.llt.solve(y_);
}

Matrix GpModel::noisy_kernel() const {
    Matrix K = kernel_matrix(X_, X_, params_);
    K.diagonal().array() += noise_ * noise_ + fac_.jitter;
    return K;
}

double GpModel::log_marginal_likelihood() const {
    const auto n = static_cast<double>(y_.size());
    const Matrix& L = fac_.llt.matrixLLT();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) logdet += 2.0 * std::log(L(i, i));
    return -0.5 * y_.dot(alpha_) - 0.5 * logdet - 0.5 * n * std::log(2.0 * M_PI);
}

double GpModel::noise_variance_gradient() const {
    const Matrix Kinv = fac_.llt.solve(Matrix::Identity(y_.size(), y_.size()));
    return 0.5 * (alpha_.squaredNorm() - Kinv.trace());
}

Vector GpModel::hyper_gradient() const {
    const Eigen::Index n = y_.size();
    const Matrix Kinv = fac_.llt.solve(Matrix::Identity(n, n));
    const Matrix W = alpha_ * alpha_.transpose() - Kinv;
    Vector g(1 + X_.cols());
    // d K / d log sigma = 2 K (noise-free part)
    const Matrix K = kernel_matrix(X_, X_, params_);
    g(0) = 0.5 * (W.cwiseProduct(2.0 * K)).sum();
    for (Eigen::Index d = 0; d < X_.cols(); ++d) {
        const Matrix G = kernel_lengthscale_gradient(X_, params_, d);
        g(1 + d) = 0.5 * (W.cwiseProduct(G)).sum();
    }
    return g;
}

Vector GpModel::posterior_mean(const Matrix& queries) const {
    return kernel_matrix(queries, X_, params_) * alpha_;
}

Matrix GpModel::posterior_cross(const Matrix& A, const Matrix& B) const {
    const Matrix Ka = kernel_matrix(X_, A, params_);
    const Matrix Kb = kernel_matrix(X_, B, params_);
    const Matrix Va = fac_.llt.matrixL().solve(Ka);
    const Matrix Vb = fac_.llt.matrixL().solve(Kb);
    return kernel_matrix(A, B, params_) - Va.transpose() * Vb;
}

Vector GpModel::posterior_variance(const Matrix& queries) const {
    const Matrix Ks = kernel_matrix(X_, queries, params_);
    const Matrix V = fac_.llt.matrixL().solve(Ks);
    Vector var(queries.rows());
    const double s2 = params_.sigma * params_.sigma;
    for (Eigen::Index i = 0; i < queries.rows(); ++i) var(i) = s2 - V.col(i).squaredNorm();
    return var;
}

Vector GpModel::training_posterior_variance() const {
    const Eigen::Index n = y_.size();
    const Matrix Kinv = fac_.llt.solve(Matrix::Identity(n, n));
    const double s = noise_ * noise_ + fac_.jitter;
    return (s * (1.0 - s * Kinv.diagonal().array())).cwiseMax(0.0);
}

Vector GpModel::training_posterior_mean() const {
    return y_ - (noise_ * noise_ + fac_.jitter) * alpha_;
}

SurrogatePosterior GpModel::posterior(const Matrix& queries) const {
    const Matrix Ks = kernel_matrix(X_, queries, params_);
    const Matrix V = fac_.llt.matrixL().solve(Ks);
    SurrogatePosterior p;
    p.mean = Ks.transpose() * alpha_;
    p.cov = kernel_matrix(queries, queries, params_) - V.transpose() * V;
    p.cov = 0.5 * (p.cov + p.cov.transpose());
    return p;
}

Matrix standard_normals(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix Z(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) Z(i, j) = g(rng);
    return Z;
}

Matrix GpModel::sample_posterior(const Matrix& queries, int n_samples, std::uint64_t seed) const {
    if (n_samples < 1) throw std::invalid_argument("need at least one posterior sample");
    const auto post = posterior(queries);
    const auto f = factorize_with_jitter(post.cov);
    const Matrix L = f.llt.matrixL();
    const Matrix Z = standard_normals(n_samples, queries.rows(), seed);
    Matrix S = Z * L.transpose();
    S.rowwise() += post.mean.transpose();
    return S;
}

}  // namespace heatplan::gp
