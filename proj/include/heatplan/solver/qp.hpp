#pragma once

// Convex quadratic programming by operator splitting.
//
// Solves   min  1/2 z' Q z + q' z
//          s.t. A_eq z  = b_eq
//               l_in <= A_in z <= u_in
//
// The equality and inequality blocks are stacked into a single two-sided
// constraint set and handled by an ADMM iteration on the equilibrated
// problem. A single sparse factorization is reused until the step size is
// adapted; an active-set polish step refines near-converged iterates.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <limits>
#include <string>

namespace heatplan::solver {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Bounds with magnitude at or above this value are treated as infinite.
inline constexpr double kInfinity = 1e30;

struct QuadraticProgram {
    SparseMatrix Q;  // symmetric PSD, num_vars x num_vars
    Vector q;
    SparseMatrix A_eq;
    Vector b_eq;
    SparseMatrix A_in;
    Vector l_in;
    Vector u_in;

    [[nodiscard]] Eigen::Index num_vars() const { return q.size(); }
    [[nodiscard]] Eigen::Index num_eq() const { return b_eq.size(); }
    [[nodiscard]] Eigen::Index num_in() const { return l_in.size(); }

    /// Throws std::invalid_argument when dimensions disagree, bounds cross,
    /// Q is asymmetric, or (for n <= 64) Q has an eigenvalue below -1e-9.
    void validate() const;

    /// 1/2 z'Qz + q'z.
    [[nodiscard]] double objective(const Vector& z) const;
};

struct SolverSettings {
    double eps_abs{1e-6};
    double eps_rel{1e-6};
    double eps_prim_inf{1e-7};
    double eps_dual_inf{1e-7};
    int max_iter{50000};
    double rho{0.1};
    double sigma{1e-6};
    double alpha{1.6};  // over-relaxation
    int scaling_iters{15};
    bool adaptive_rho{true};
    double adaptive_rho_tolerance{5.0};
    int check_interval{25};
    bool polish{true};
    /// Polish is attempted once both residuals are within this factor of tolerance.
    double polish_trigger{10.0};
    int polish_refine_iters{5};
    /// Regularization of the factorized polish system only.
    double ridge{1e-10};
};

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };

[[nodiscard]] std::string to_string(SolveStatus status);

struct QpSolution {
    Vector z;
    Vector y_eq;  // multipliers of A_eq z = b_eq
    Vector y_in;  // >0 when the upper side is active, <0 for the lower side
    double objective{std::numeric_limits<double>::quiet_NaN()};
    SolveStatus status{SolveStatus::max_iter};
    /// Residuals normalized as r / (1 + magnitude of the terms forming r).
    double primal_residual{std::numeric_limits<double>::infinity()};
    double dual_residual{std::numeric_limits<double>::infinity()};
    int iterations{0};
    bool polished{false};
};

[[nodiscard]] QpSolution solve_qp(const QuadraticProgram& problem, const SolverSettings& settings = {});

struct KktReport {
    double primal{0.0};           // max violation of A_eq z = b, l <= A_in z <= u
    double stationarity{0.0};     // ||Qz + q + A_eq'y_eq + A_in'y_in||_inf
    double complementarity{0.0};  // max over rows of min(|y| on a side, slack on that side), plus sign errors
    bool passed{false};

    [[nodiscard]] double max() const;
};

/// Absolute KKT residuals of a candidate solution. Pure check.
[[nodiscard]] KktReport verify_kkt(const QuadraticProgram& problem, const QpSolution& solution, double tol);

}  // namespace heatplan::solver
