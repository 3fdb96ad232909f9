#pragma once

#include <Eigen/Dense>

#include <string>

namespace heatplan::gp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Smoothness { half, three_halves, five_halves };

[[nodiscard]] double nu_value(Smoothness nu);
[[nodiscard]] std::string to_string(Smoothness nu);
/// Parses "0.5", "1.5", "2.5" (also "1/2", "3/2", "5/2"); throws std::invalid_argument otherwise.
[[nodiscard]] Smoothness parse_smoothness(const std::string& s);
/// Throws std::invalid_argument unless nu is 0.5, 1.5 or 2.5.
[[nodiscard]] Smoothness smoothness_from_value(double nu);

struct KernelParams {
    double sigma{1.0};  // output scale, k(x, x) = sigma^2
    Smoothness nu{Smoothness::five_halves};
    Vector lengthscales;  // one per input dimension

    void validate(Eigen::Index dims) const;
};

/// Scaled distance r = || (x - y) / l ||.
[[nodiscard]] double scaled_distance(const Vector& x, const Vector& y, const Vector& lengthscales);

/// Matern profile with unit variance as a function of r.
[[nodiscard]] double matern_profile(Smoothness nu, double r);

[[nodiscard]] double matern_kernel(const Vector& x, const Vector& y, const KernelParams& p);

/// Rows of A and B are points. Returns k(A_i, B_j).
[[nodiscard]] Matrix kernel_matrix(const Matrix& A, const Matrix& B, const KernelParams& p);

/// d K / d log(l_dim) for the square kernel matrix of X.
[[nodiscard]] Matrix kernel_lengthscale_gradient(const Matrix& X, const KernelParams& p, Eigen::Index dim);

}  // namespace heatplan::gp
