#pragma once

// Test-only QP fixtures and brute-force LP oracle.

#include "heatplan/solver/qp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace heatplan::testing {

using solver::QuadraticProgram;
using solver::SparseMatrix;
using solver::Vector;

inline SparseMatrix to_sparse(const Eigen::MatrixXd& m) { return m.sparseView(0.0, 0.0); }

/// Random convex QP with a known feasible interior point and finite box bounds.
inline QuadraticProgram random_qp(std::mt19937_64& rng, int n, int m_in, int m_eq, bool linear = false) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    Eigen::MatrixXd F(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) F(i, j) = g(rng);
    const int rank = std::max(1, n / 2);
    Eigen::MatrixXd Q = linear ? Eigen::MatrixXd::Zero(n, n)
                               : Eigen::MatrixXd(F.leftCols(rank) * F.leftCols(rank).transpose());
    Vector q(n);
    for (int i = 0; i < n; ++i) q(i) = g(rng);
    Vector z0(n);
    for (int i = 0; i < n; ++i) z0(i) = g(rng);

    Eigen::MatrixXd A(m_in + n, n);
    Vector l(m_in + n), up(m_in + n);
    for (int i = 0; i < m_in; ++i) {
        for (int j = 0; j < n; ++j) A(i, j) = g(rng);
        const double v = A.row(i).dot(z0);
        l(i) = v - u(rng);
        up(i) = v + u(rng);
        if (i % 3 == 1) l(i) = -solver::kInfinity;
    }
    A.bottomRows(n).setIdentity();
    for (int j = 0; j < n; ++j) {
        l(m_in + j) = z0(j) - 1.0 - u(rng);
        up(m_in + j) = z0(j) + 1.0 + u(rng);
    }
    Eigen::MatrixXd E(m_eq, n);
    for (int i = 0; i < m_eq; ++i)
        for (int j = 0; j < n; ++j) E(i, j) = g(rng);
    QuadraticProgram p;
    p.Q = to_sparse(Q);
    p.q = q;
    p.A_eq = to_sparse(E);
    p.b_eq = E * z0;
    p.A_in = to_sparse(A);
    p.l_in = l;
    p.u_in = up;
    return p;
}

/// Minimum of c'z over {z : A_eq z = b, l <= A_in z <= u} by enumerating every
/// basic solution. Only meant for n <= 4 with bounded feasible sets.
inline double lp_vertex_oracle(const QuadraticProgram& p) {
    const int n = static_cast<int>(p.num_vars());
    const Eigen::MatrixXd Aeq(p.A_eq);
    const Eigen::MatrixXd Ain(p.A_in);
    // Collect hyperplanes a'z = b.
    std::vector<Eigen::RowVectorXd> planes;
    std::vector<double> rhs;
    for (int i = 0; i < Aeq.rows(); ++i) {
        planes.push_back(Aeq.row(i));
        rhs.push_back(p.b_eq(i));
    }
    const int n_eq = static_cast<int>(planes.size());
    for (int i = 0; i < Ain.rows(); ++i) {
        if (p.l_in(i) > -solver::kInfinity) {
            planes.push_back(Ain.row(i));
            rhs.push_back(p.l_in(i));
        }
        if (p.u_in(i) < solver::kInfinity) {
            planes.push_back(Ain.row(i));
            rhs.push_back(p.u_in(i));
        }
    }
    const int total = static_cast<int>(planes.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(static_cast<std::size_t>(n));
    // Every vertex satisfies all equalities; choose the remaining n - n_eq planes.
    const int free = n - n_eq;
    std::vector<int> idx(static_cast<std::size_t>(free));
    auto visit = [&](auto&& self, int start, int depth) -> void {
        if (depth == free) {
            Eigen::MatrixXd M(n, n);
            Vector b(n);
            for (int r = 0; r < n_eq; ++r) {
                M.row(r) = planes[static_cast<std::size_t>(r)];
                b(r) = rhs[static_cast<std::size_t>(r)];
            }
            for (int r = 0; r < free; ++r) {
                M.row(n_eq + r) = planes[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
                b(n_eq + r) = rhs[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            if (lu.rank() < n) return;
            const Vector z = lu.solve(b);
            const double tol = 1e-9 * (1.0 + z.lpNorm<Eigen::Infinity>());
            if (Aeq.rows() > 0 && (Aeq * z - p.b_eq).lpNorm<Eigen::Infinity>() > tol) return;
            const Vector az = Ain * z;
            for (int i = 0; i < az.size(); ++i) {
                if (az(i) < p.l_in(i) - tol || az(i) > p.u_in(i) + tol) return;
            }
            best = std::min(best, p.q.dot(z));
            return;
        }
        for (int k = start; k < total; ++k) {
            idx[static_cast<std::size_t>(depth)] = k;
            self(self, k + 1, depth + 1);
        }
    };
    visit(visit, n_eq, 0);
    return best;
}

}  // namespace heatplan::testing
