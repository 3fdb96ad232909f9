#include "heatplan/solver/qp.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace heatplan::solver {

namespace {

constexpr double kMinScaling = 1e-4;
constexpr double kMaxScaling = 1e4;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoEqualityFactor = 1e3;
constexpr double kPolishDelta = 1e-7;

bool is_inf(double v) { return std::abs(v) >= kInfinity; }

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

Vector column_inf_norms(const SparseMatrix& m) {
    Vector norms = Vector::Zero(m.cols());
    for (Eigen::Index j = 0; j < m.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
            norms(j) = std::max(norms(j), std::abs(it.value()));
        }
    }
    return norms;
}

Vector row_inf_norms(const SparseMatrix& m) {
    Vector norms = Vector::Zero(m.rows());
    for (Eigen::Index j = 0; j < m.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
            norms(it.row()) = std::max(norms(it.row()), std::abs(it.value()));
        }
    }
    return norms;
}

double limit_scaling(double v) {
    if (v < kMinScaling) return 1.0;
    return std::min(v, kMaxScaling);
}

SparseMatrix diagonal(const Vector& d) {
    SparseMatrix m(d.size(), d.size());
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom, Eigen::Index cols) {
    SparseMatrix out(top.rows() + bottom.rows(), cols);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(top.nonZeros() + bottom.nonZeros()));
    for (Eigen::Index j = 0; j < top.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(top, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index j = 0; j < bottom.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(bottom, j); it; ++it)
            t.emplace_back(top.rows() + it.row(), it.col(), it.value());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

Vector project(const Vector& v, const Vector& l, const Vector& u) { return v.cwiseMax(l).cwiseMin(u); }

// Problem data after Ruiz equilibration and cost scaling:
//   P = c D Q D, q = c D q, A = E A D, l = E l, u = E u.
struct ScaledProblem {
    SparseMatrix P;
    SparseMatrix A;
    SparseMatrix At;
    Vector q, l, u;
    Vector D, E, Dinv, Einv;
    double c{1.0};
    // Original data, kept for unscaled residuals.
    Vector l_orig, u_orig;
};

ScaledProblem equilibrate(const QuadraticProgram& p, int iters) {
    const Eigen::Index n = p.num_vars();
    ScaledProblem s;
    s.P = p.Q;
    s.q = p.q;
    s.A = vstack(p.A_eq, p.A_in, n);
    s.l_orig.resize(s.A.rows());
    s.u_orig.resize(s.A.rows());
    s.l_orig << p.b_eq, p.l_in;
    s.u_orig << p.b_eq, p.u_in;
    for (Eigen::Index i = 0; i < s.l_orig.size(); ++i) {
        if (s.l_orig(i) <= -kInfinity) s.l_orig(i) = -kInfinity;
        if (s.u_orig(i) >= kInfinity) s.u_orig(i) = kInfinity;
    }
    const Eigen::Index m = s.A.rows();
    s.D = Vector::Ones(n);
    s.E = Vector::Ones(m);
    s.c = 1.0;

    for (int k = 0; k < iters; ++k) {
        Vector col = column_inf_norms(s.P).cwiseMax(column_inf_norms(s.A));
        Vector row = row_inf_norms(s.A);
        Vector dk(n), ek(m);
        for (Eigen::Index j = 0; j < n; ++j) dk(j) = 1.0 / std::sqrt(limit_scaling(col(j)));
        for (Eigen::Index i = 0; i < m; ++i) ek(i) = 1.0 / std::sqrt(limit_scaling(row(i)));
        const SparseMatrix Dk = diagonal(dk);
        const SparseMatrix Ek = diagonal(ek);
        s.P = Dk * s.P * Dk;
        s.A = Ek * s.A * Dk;
        s.q = s.q.cwiseProduct(dk);
        s.D = s.D.cwiseProduct(dk);
        s.E = s.E.cwiseProduct(ek);

        const double mean_col = n > 0 ? column_inf_norms(s.P).mean() : 0.0;
        double cost = std::max(mean_col, inf_norm(s.q));
        cost = limit_scaling(cost);
        const double ck = 1.0 / cost;
        s.P *= ck;
        s.q *= ck;
        s.c *= ck;
    }
    s.P.makeCompressed();
    s.A.makeCompressed();
    s.At = s.A.transpose();
    s.Dinv = s.D.cwiseInverse();
    s.Einv = s.E.cwiseInverse();
    s.l.resize(m);
    s.u.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        s.l(i) = is_inf(s.l_orig(i)) ? -kInfinity : s.E(i) * s.l_orig(i);
        s.u(i) = is_inf(s.u_orig(i)) ? kInfinity : s.E(i) * s.u_orig(i);
    }
    return s;
}

struct Residuals {
    double prim{0}, dual{0};
    double prim_norm{0}, dual_norm{0};
    // Scaled-space quantities used to adapt rho.
    double prim_scaled{0}, dual_scaled{0}, prim_norm_scaled{0}, dual_norm_scaled{0};

    [[nodiscard]] double prim_normalized() const { return prim / (1.0 + prim_norm); }
    [[nodiscard]] double dual_normalized() const { return dual / (1.0 + dual_norm); }
};

Residuals compute_residuals(const ScaledProblem& s, const Vector& x, const Vector& z, const Vector& y) {
    Residuals r;
    const Vector Ax = s.A * x;
    const Vector Px = s.P * x;
    const Vector Aty = s.At * y;
    r.prim = inf_norm(s.Einv.cwiseProduct(Ax - z));
    r.prim_norm = std::max(inf_norm(s.Einv.cwiseProduct(Ax)), inf_norm(s.Einv.cwiseProduct(z)));
    const double cinv = 1.0 / s.c;
    r.dual = cinv * inf_norm(s.Dinv.cwiseProduct(Px + s.q + Aty));
    r.dual_norm = cinv * std::max({inf_norm(s.Dinv.cwiseProduct(Px)), inf_norm(s.Dinv.cwiseProduct(Aty)),
                                   inf_norm(s.Dinv.cwiseProduct(s.q))});
    r.prim_scaled = inf_norm(Ax - z);
    r.prim_norm_scaled = std::max(inf_norm(Ax), inf_norm(z));
    r.dual_scaled = inf_norm(Px + s.q + Aty);
    r.dual_norm_scaled = std::max({inf_norm(Px), inf_norm(Aty), inf_norm(s.q)});
    return r;
}

bool converged(const Residuals& r, const SolverSettings& st, double factor = 1.0) {
    return r.prim <= factor * (st.eps_abs + st.eps_rel * r.prim_norm) &&
           r.dual <= factor * (st.eps_abs + st.eps_rel * r.dual_norm);
}

bool primal_infeasible(const ScaledProblem& s, const Vector& dy, double eps) {
    const Vector dy_bar = s.E.cwiseProduct(dy);
    const double norm = inf_norm(dy_bar);
    if (norm < 1e-30) return false;
    const double at_dy = inf_norm(s.Dinv.cwiseProduct(s.At * dy));
    if (at_dy > eps * norm) return false;
    double support = 0.0;
    for (Eigen::Index i = 0; i < dy_bar.size(); ++i) {
        if (dy_bar(i) > 0) {
            if (is_inf(s.u_orig(i))) return false;
            support += s.u_orig(i) * dy_bar(i);
        } else if (dy_bar(i) < 0) {
            if (is_inf(s.l_orig(i))) return false;
            support += s.l_orig(i) * dy_bar(i);
        }
    }
    return support < -eps * norm;
}

bool dual_infeasible(const ScaledProblem& s, const Vector& dx, double eps) {
    const Vector dx_bar = s.D.cwiseProduct(dx);
    const double norm = inf_norm(dx_bar);
    if (norm < 1e-30) return false;
    const double cinv = 1.0 / s.c;
    if (cinv * inf_norm(s.Dinv.cwiseProduct(s.P * dx)) > eps * norm) return false;
    if (cinv * s.q.dot(dx) >= -eps * norm) return false;
    const Vector Adx = s.Einv.cwiseProduct(s.A * dx);
    for (Eigen::Index i = 0; i < Adx.size(); ++i) {
        if (!is_inf(s.u_orig(i)) && Adx(i) > eps * norm) return false;
        if (!is_inf(s.l_orig(i)) && Adx(i) < -eps * norm) return false;
    }
    return true;
}

Vector rho_vector(const ScaledProblem& s, double rho) {
    Vector r(s.l.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (is_inf(s.l(i)) && is_inf(s.u(i))) {
            r(i) = kRhoMin;
        } else if (s.u(i) - s.l(i) < 1e-12 * std::max(1.0, std::abs(s.u(i)))) {
            r(i) = kRhoEqualityFactor * rho;
        } else {
            r(i) = rho;
        }
    }
    return r;
}

class KktFactor {
public:
    KktFactor(const ScaledProblem& s, double sigma, double ridge) : s_(s), sigma_(sigma), ridge_(ridge) {}

    bool factorize(const Vector& rho) {
        SparseMatrix m = s_.P + s_.At * diagonal(rho) * s_.A;
        SparseMatrix shift = diagonal(Vector::Constant(s_.P.rows(), sigma_ + ridge_));
        m = m + shift;
        m.makeCompressed();
        if (!analyzed_) {
            solver_.analyzePattern(m);
            analyzed_ = true;
        }
        solver_.factorize(m);
        return solver_.info() == Eigen::Success;
    }

    Vector solve(const Vector& rhs) const { return solver_.solve(rhs); }

private:
    const ScaledProblem& s_;
    double sigma_;
    double ridge_;
    bool analyzed_{false};
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> solver_;
};

struct PolishResult {
    Vector x, z, y;
    bool primal_only{false};
};

// Equality-constrained QP on a working set of rows; side -1 lower, +1 upper, 0 equality.
struct WorkingSolve {
    Vector x;
    Vector mult;
};

std::optional<WorkingSolve> solve_working_set(const ScaledProblem& s, const std::vector<Eigen::Index>& rows,
                                              const std::vector<int>& side, int refine_iters) {
    const Eigen::Index n = s.P.rows();
    const Eigen::Index m = s.A.rows();
    const auto k = static_cast<Eigen::Index>(rows.size());

    std::vector<Triplet> t;
    std::vector<Triplet> t_exact;
    for (Eigen::Index j = 0; j < s.P.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(s.P, j); it; ++it) {
            t.emplace_back(it.row(), it.col(), it.value());
            t_exact.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) t.emplace_back(j, j, kPolishDelta);
    std::vector<Eigen::Index> position(static_cast<std::size_t>(m), -1);
    for (Eigen::Index r = 0; r < k; ++r) position[static_cast<std::size_t>(rows[static_cast<std::size_t>(r)])] = r;
    for (Eigen::Index j = 0; j < s.A.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(s.A, j); it; ++it) {
            const Eigen::Index r = position[static_cast<std::size_t>(it.row())];
            if (r < 0) continue;
            t.emplace_back(n + r, it.col(), it.value());
            t.emplace_back(it.col(), n + r, it.value());
            t_exact.emplace_back(n + r, it.col(), it.value());
            t_exact.emplace_back(it.col(), n + r, it.value());
        }
    }
    for (Eigen::Index r = 0; r < k; ++r) t.emplace_back(n + r, n + r, -kPolishDelta);

    SparseMatrix K(n + k, n + k), K_exact(n + k, n + k);
    K.setFromTriplets(t.begin(), t.end());
    K_exact.setFromTriplets(t_exact.begin(), t_exact.end());
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt(K);
    if (ldlt.info() != Eigen::Success) return std::nullopt;

    Vector rhs(n + k);
    rhs.head(n) = -s.q;
    for (Eigen::Index r = 0; r < k; ++r) {
        const auto row = rows[static_cast<std::size_t>(r)];
        rhs(n + r) = side[static_cast<std::size_t>(r)] > 0 ? s.u(row) : s.l(row);
    }
    Vector sol = ldlt.solve(rhs);
    for (int it = 0; it < refine_iters; ++it) {
        const Vector resid = rhs - K_exact * sol;
        sol += ldlt.solve(resid);
    }
    if (!sol.allFinite()) return std::nullopt;
    return WorkingSolve{sol.head(n), sol.tail(k)};
}

// Solve the equality-constrained QP of the active set guessed from (z, y).
// A degenerate guess can give wrong-signed multipliers; then a couple of
// active-set repair passes are tried, and failing those the first primal
// point is returned with the ADMM multipliers if it is feasible.
std::optional<PolishResult> polish(const ScaledProblem& s, const Vector& z, const Vector& y, int refine_iters) {
    const Eigen::Index m = s.A.rows();
    std::vector<int> state(static_cast<std::size_t>(m), 2);  // 2 inactive
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& st = state[static_cast<std::size_t>(i)];
        if (!is_inf(s.l(i)) && s.u(i) - s.l(i) < 1e-12 * std::max(1.0, std::abs(s.u(i)))) {
            st = 0;
            continue;
        }
        const bool lower = !is_inf(s.l(i)) && z(i) - s.l(i) < -y(i);
        const bool upper = !is_inf(s.u(i)) && s.u(i) - z(i) < y(i);
        if (lower && (!upper || y(i) < 0))
            st = -1;
        else if (upper)
            st = 1;
    }

    std::optional<PolishResult> primal_only;
    constexpr int kMaxPasses = 3;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        std::vector<Eigen::Index> rows;
        std::vector<int> side;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (state[static_cast<std::size_t>(i)] == 2) continue;
            rows.push_back(i);
            side.push_back(state[static_cast<std::size_t>(i)]);
        }
        const auto ws = solve_working_set(s, rows, side, refine_iters);
        if (!ws) break;

        const double ynorm = std::max(1.0, inf_norm(ws->mult));
        bool changed = false;
        std::vector<char> released(static_cast<std::size_t>(m), 0);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double yr = ws->mult(static_cast<Eigen::Index>(r));
            const double wrong = side[r] < 0 ? yr : (side[r] > 0 ? -yr : 0.0);
            if (wrong > 1e-9 * ynorm) {
                state[static_cast<std::size_t>(rows[r])] = 2;
                released[static_cast<std::size_t>(rows[r])] = 1;
                changed = true;
            }
        }
        const Vector ax = s.A * ws->x;
        const double scale = std::max(1.0, inf_norm(ax));
        bool feasible = true;
        for (Eigen::Index i = 0; i < m; ++i) {
            const bool low = !is_inf(s.l(i)) && ax(i) < s.l(i) - 1e-9 * scale;
            const bool high = !is_inf(s.u(i)) && ax(i) > s.u(i) + 1e-9 * scale;
            if (!low && !high) continue;
            feasible = false;
            auto& st = state[static_cast<std::size_t>(i)];
            if (st != 2 || released[static_cast<std::size_t>(i)]) continue;
            st = low ? -1 : 1;
            changed = true;
        }
        if (!changed) {
            PolishResult out;
            out.x = ws->x;
            out.y = Vector::Zero(m);
            for (std::size_t r = 0; r < rows.size(); ++r) out.y(rows[r]) = ws->mult(static_cast<Eigen::Index>(r));
            out.z = project(ax, s.l, s.u);
            return out;
        }
        if (pass == 0 && feasible) primal_only = PolishResult{ws->x, project(ax, s.l, s.u), y, true};
    }
    return primal_only;
}

double scaled_objective(const ScaledProblem& s, const Vector& x) { return 0.5 * x.dot(s.P * x) + s.q.dot(x); }

// A primal-only polish must not lose objective against the ADMM iterate.
bool no_worse(const ScaledProblem& s, const PolishResult& pol, const Vector& x, const SolverSettings& st) {
    if (!pol.primal_only) return true;
    const double before = scaled_objective(s, x);
    return scaled_objective(s, pol.x) <= before + st.eps_rel * std::max(1.0, std::abs(before));
}

void finalize(const QuadraticProgram& p, const ScaledProblem& s, const Vector& x, const Vector& y,
              const Residuals& r, QpSolution& out) {
    out.z = s.D.cwiseProduct(x);
    const Vector y_full = s.E.cwiseProduct(y) / s.c;
    out.y_eq = y_full.head(p.num_eq());
    out.y_in = y_full.tail(p.num_in());
    out.objective = p.objective(out.z);
    out.primal_residual = r.prim_normalized();
    out.dual_residual = r.dual_normalized();
}

}  // namespace

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::max_iter: return "max_iter";
    }
    return "unknown";
}

void QuadraticProgram::validate() const {
    const Eigen::Index n = q.size();
    if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("Q must be num_vars x num_vars");
    if (A_eq.cols() != n || A_eq.rows() != b_eq.size())
        throw std::invalid_argument("A_eq dimensions do not match b_eq / num_vars");
    if (A_in.cols() != n || A_in.rows() != l_in.size() || l_in.size() != u_in.size())
        throw std::invalid_argument("A_in dimensions do not match l_in / u_in / num_vars");
    for (Eigen::Index i = 0; i < l_in.size(); ++i) {
        if (l_in(i) > u_in(i)) throw std::invalid_argument("l_in exceeds u_in at row " + std::to_string(i));
    }
    if (!q.allFinite() || !b_eq.allFinite()) throw std::invalid_argument("non-finite cost or equality data");
    const SparseMatrix asym = Q - SparseMatrix(Q.transpose());
    const double scale = std::max(1.0, Q.size() > 0 ? column_inf_norms(Q).maxCoeff() : 0.0);
    for (Eigen::Index j = 0; j < asym.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(asym, j); it; ++it)
            if (std::abs(it.value()) > 1e-9 * scale) throw std::invalid_argument("Q is not symmetric");
    if (n > 0 && n <= 64) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(Q), Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-9 * scale) throw std::invalid_argument("Q is not positive semidefinite");
    }
}

double QuadraticProgram::objective(const Vector& z) const { return 0.5 * z.dot(Q * z) + q.dot(z); }

QpSolution solve_qp(const QuadraticProgram& problem, const SolverSettings& settings) {
    problem.validate();
    const ScaledProblem s = equilibrate(problem, settings.scaling_iters);
    const Eigen::Index n = problem.num_vars();
    const Eigen::Index m = s.A.rows();

    QpSolution out;
    Vector x = Vector::Zero(n);
    Vector z = Vector::Zero(m);
    Vector y = Vector::Zero(m);
    z = project(z, s.l, s.u);

    double rho = settings.rho;
    Vector rho_vec = rho_vector(s, rho);
    KktFactor kkt(s, settings.sigma, settings.ridge);
    if (!kkt.factorize(rho_vec)) throw std::runtime_error("KKT factorization failed");

    Residuals res;
    Vector x_prev(n), y_prev(m);
    int polish_attempts = 0;
    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        x_prev = x;
        y_prev = y;
        const Vector rhs = settings.sigma * x - s.q + s.At * (rho_vec.cwiseProduct(z) - y);
        const Vector x_tilde = kkt.solve(rhs);
        const Vector z_tilde = s.A * x_tilde;
        x = settings.alpha * x_tilde + (1.0 - settings.alpha) * x_prev;
        const Vector z_relaxed = settings.alpha * z_tilde + (1.0 - settings.alpha) * z;
        const Vector z_next = project(z_relaxed + y.cwiseQuotient(rho_vec), s.l, s.u);
        y = y + rho_vec.cwiseProduct(z_relaxed - z_next);
        z = z_next;

        const bool check = iter == 1 || iter % settings.check_interval == 0 || iter == settings.max_iter;
        if (!check) continue;

        res = compute_residuals(s, x, z, y);
        out.iterations = iter;
        if (converged(res, settings)) {
            out.status = SolveStatus::optimal;
            break;
        }
        if (primal_infeasible(s, y - y_prev, settings.eps_prim_inf)) {
            out.status = SolveStatus::infeasible;
            finalize(problem, s, x, y, res, out);
            // Certificate direction is reported through the unscaled multipliers.
            const Vector dy = s.E.cwiseProduct(y - y_prev);
            out.y_eq = dy.head(problem.num_eq());
            out.y_in = dy.tail(problem.num_in());
            return out;
        }
        if (dual_infeasible(s, x - x_prev, settings.eps_dual_inf)) {
            out.status = SolveStatus::unbounded;
            finalize(problem, s, x, y, res, out);
            return out;
        }
        if (settings.polish && polish_attempts < 4 && converged(res, settings, settings.polish_trigger)) {
            ++polish_attempts;
            if (auto pol = polish(s, z, y, settings.polish_refine_iters)) {
                const Residuals pres = compute_residuals(s, pol->x, pol->z, pol->y);
                if (!pol->primal_only && converged(pres, settings)) {
                    x = pol->x;
                    z = pol->z;
                    y = pol->y;
                    res = pres;
                    out.polished = true;
                    out.status = SolveStatus::optimal;
                    break;
                }
            }
        }
        if (settings.adaptive_rho) {
            const double ratio = (res.prim_scaled / (res.prim_norm_scaled + 1e-10)) /
                                 (res.dual_scaled / (res.dual_norm_scaled + 1e-10) + 1e-30);
            const double rho_new = std::clamp(rho * std::sqrt(ratio), kRhoMin, kRhoMax);
            if (rho_new > settings.adaptive_rho_tolerance * rho || rho_new < rho / settings.adaptive_rho_tolerance) {
                rho = rho_new;
                rho_vec = rho_vector(s, rho);
                if (!kkt.factorize(rho_vec)) throw std::runtime_error("KKT refactorization failed");
            }
        }
    }

    if (out.status == SolveStatus::optimal && settings.polish && !out.polished) {
        if (auto pol = polish(s, z, y, settings.polish_refine_iters)) {
            const Residuals pres = compute_residuals(s, pol->x, pol->z, pol->y);
            if (pol->primal_only) {
                // Exactly feasible point on the guessed face; multipliers and the
                // dual residual stay those of the ADMM iterate.
                if (pres.prim <= res.prim + 1e-12 && no_worse(s, *pol, x, settings)) {
                    x = pol->x;
                    z = pol->z;
                    res.prim = pres.prim;
                    res.prim_norm = pres.prim_norm;
                    out.polished = true;
                }
            } else if (pres.prim <= res.prim + 1e-12 && pres.dual <= res.dual + 1e-12) {
                x = pol->x;
                z = pol->z;
                y = pol->y;
                res = pres;
                out.polished = true;
            }
        }
    }
    finalize(problem, s, x, y, res, out);
    return out;
}

double KktReport::max() const { return std::max({primal, stationarity, complementarity}); }

KktReport verify_kkt(const QuadraticProgram& p, const QpSolution& sol, double tol) {
    KktReport r;
    const Vector& z = sol.z;
    if (p.num_eq() > 0) r.primal = inf_norm(p.A_eq * z - p.b_eq);
    const Vector az = p.A_in * z;
    for (Eigen::Index i = 0; i < az.size(); ++i) {
        if (!is_inf(p.u_in(i))) r.primal = std::max(r.primal, az(i) - p.u_in(i));
        if (!is_inf(p.l_in(i))) r.primal = std::max(r.primal, p.l_in(i) - az(i));
    }
    Vector grad = p.Q * z + p.q;
    if (sol.y_eq.size() == p.num_eq() && p.num_eq() > 0) grad += p.A_eq.transpose() * sol.y_eq;
    if (sol.y_in.size() == p.num_in() && p.num_in() > 0) grad += p.A_in.transpose() * sol.y_in;
    r.stationarity = inf_norm(grad);
    for (Eigen::Index i = 0; i < sol.y_in.size() && i < az.size(); ++i) {
        const double yi = sol.y_in(i);
        if (yi > 0) {
            const double slack = is_inf(p.u_in(i)) ? kInfinity : std::abs(p.u_in(i) - az(i));
            r.complementarity = std::max(r.complementarity, std::min(yi, slack));
        } else if (yi < 0) {
            const double slack = is_inf(p.l_in(i)) ? kInfinity : std::abs(az(i) - p.l_in(i));
            r.complementarity = std::max(r.complementarity, std::min(-yi, slack));
        }
    }
    r.passed = r.max() <= tol;
    return r;
}

}  // namespace heatplan::solver
