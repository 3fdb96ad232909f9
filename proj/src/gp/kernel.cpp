#include "heatplan/gp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace heatplan::gp {

double nu_value(Smoothness nu) {
    switch (nu) {
        case Smoothness::half: return 0.5;
        case Smoothness::three_halves: return 1.5;
        case Smoothness::five_halves: return 2.5;
    }
    return 0.0;
}

std::string to_string(Smoothness nu) {
    switch (nu) {
        case Smoothness::half: return "1/2";
        case Smoothness::three_halves: return "3/2";
        case Smoothness::five_halves: return "5/2";
    }
    return "?";
}

Smoothness smoothness_from_value(double nu) {
    if (nu == 0.5) return Smoothness::half;
    if (nu == 1.5) return Smoothness::three_halves;
    if (nu == 2.5) return Smoothness::five_halves;
    throw std::invalid_argument("Matern smoothness must be 1/2, 3/2 or 5/2, got " + std::to_string(nu));
}

Smoothness parse_smoothness(const std::string& s) {
    if (s == "1/2" || s == "0.5") return Smoothness::half;
    if (s == "3/2" || s == "1.5") return Smoothness::three_halves;
    if (s == "5/2" || s == "2.5") return Smoothness::five_halves;
    throw std::invalid_argument("Matern smoothness must be 1/2, 3/2 or 5/2, got '" + s + "'");
}

void KernelParams::validate(Eigen::Index dims) const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("kernel sigma must be positive");
    if (lengthscales.size() != dims)
        throw std::invalid_argument("kernel needs " + std::to_string(dims) + " length scales, got " +
                                    std::to_string(lengthscales.size()));
    for (Eigen::Index i = 0; i < dims; ++i)
        if (!(lengthscales(i) > 0.0) || !std::isfinite(lengthscales(i)))
            throw std::invalid_argument("kernel length scales must be positive");
}

double scaled_distance(const Vector& x, const Vector& y, const Vector& lengthscales) {
    return (x - y).cwiseQuotient(lengthscales).norm();
}

double matern_profile(Smoothness nu, double r) {
    switch (nu) {
        case Smoothness::half: return std::exp(-r);
        case Smoothness::three_halves: {
            const double s = std::sqrt(3.0) * r;
            return (1.0 + s) * std::exp(-s);
        }
        case Smoothness::five_halves: {
            const double s = std::sqrt(5.0) * r;
            return (1.0 + s + s * s / 3.0) * std::exp(-s);
        }
    }
    throw std::invalid_argument("unsupported Matern smoothness");
}

namespace {

// (d profile / dr) / r, finite at r = 0 except for nu = 1/2 (handled by caller).
double profile_slope_over_r(Smoothness nu, double r) {
    switch (nu) {
        case Smoothness::half: return r > 0.0 ? -std::exp(-r) / r : 0.0;
        case Smoothness::three_halves: return -3.0 * std::exp(-std::sqrt(3.0) * r);
        case Smoothness::five_halves: {
            const double s = std::sqrt(5.0) * r;
            return -(5.0 / 3.0) * (1.0 + s) * std::exp(-s);
        }
    }
    return 0.0;
}

}  // namespace

double matern_kernel(const Vector& x, const Vector& y, const KernelParams& p) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel inputs differ in dimension");
    return p.sigma * p.sigma * matern_profile(p.nu, scaled_distance(x, y, p.lengthscales));
}

Matrix kernel_matrix(const Matrix& A, const Matrix& B, const KernelParams& p) {
    if (A.cols() != B.cols()) throw std::invalid_argument("kernel inputs differ in dimension");
    const double s2 = p.sigma * p.sigma;
    const Vector inv = p.lengthscales.cwiseInverse();
    Matrix K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            const double r = (A.row(i) - B.row(j)).cwiseProduct(inv.transpose()).norm();
            K(i, j) = s2 * matern_profile(p.nu, r);
        }
    return K;
}

Matrix kernel_lengthscale_gradient(const Matrix& X, const KernelParams& p, Eigen::Index dim) {
    const double s2 = p.sigma * p.sigma;
    const Vector inv = p.lengthscales.cwiseInverse();
    const Eigen::Index n = X.rows();
    Matrix G = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = (X.row(i) - X.row(j)).cwiseProduct(inv.transpose()).norm();
            if (r <= 0.0) continue;
            const double d = (X(i, dim) - X(j, dim)) * inv(dim);
            // dr/dlog l = -d^2 / r
            const double g = s2 * profile_slope_over_r(p.nu, r) * (-d * d);
            G(i, j) = g;
            G(j, i) = g;
        }
    return G;
}

}  // namespace heatplan::gp
