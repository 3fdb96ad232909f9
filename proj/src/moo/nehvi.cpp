#include "heatplan/moo/nehvi.hpp"

#include "heatplan/gp/kernel.hpp"
#include "heatplan/moo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace heatplan::moo {

Nehvi::Nehvi(std::array<const gp::GpModel*, 2> models, const gp::Matrix& observed, const Point2& r, int n_samples,
             std::uint64_t seed)
    : observed_(observed), r_(r), n_samples_(n_samples) {
    if (n_samples < 1) throw std::invalid_argument("NEHVI needs at least one sample");
    if (observed.rows() < 1) throw std::invalid_argument("NEHVI needs observed points");
    const Eigen::Index n = observed.rows();
    std::array<gp::Matrix, 2> values;
    for (int k = 0; k < 2; ++k) {
        auto& o = obj_[k];
        o.model = models[k];
        if (!o.model) throw std::invalid_argument("NEHVI needs two models");
        if (o.model->inputs().cols() != observed.cols()) throw std::invalid_argument("observed points have the wrong dimension");
        const gp::Matrix k_train_obs = gp::kernel_matrix(o.model->inputs(), observed, o.model->params());
        o.v_obs = o.model->factor().matrixL().solve(k_train_obs);
        o.mean_obs = k_train_obs.transpose() * o.model->alpha();
        gp::Matrix cov = gp::kernel_matrix(observed, observed, o.model->params()) - o.v_obs.transpose() * o.v_obs;
        cov = 0.5 * (cov + cov.transpose());
        // Eigen-decomposition rather than jittered Cholesky, so a posterior
        // that is certain at the observed points gives exactly its mean.
        const double s2 = o.model->params().sigma * o.model->params().sigma;
        o.floor = 1e-12 * s2;
        const Eigen::SelfAdjointEigenSolver<gp::Matrix> eig(cov);
        if (eig.info() != Eigen::Success) throw std::runtime_error("posterior covariance decomposition failed");
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < n; ++i)
            if (eig.eigenvalues()(i) > o.floor) keep.push_back(i);
        const auto rank = static_cast<Eigen::Index>(keep.size());
        o.root_obs.resize(n, rank);
        o.whiten.resize(rank, n);
        for (Eigen::Index j = 0; j < rank; ++j) {
            const double sq = std::sqrt(eig.eigenvalues()(keep[static_cast<std::size_t>(j)]));
            const auto v = eig.eigenvectors().col(keep[static_cast<std::size_t>(j)]);
            o.root_obs.col(j) = v * sq;
            o.whiten.row(j) = v.transpose() / sq;
        }
        // Separate streams per objective; the final column drives the new point.
        const gp::Matrix z = gp::standard_normals(n_samples, n + 1, seed * 2 + static_cast<std::uint64_t>(k) + 1);
        o.z_obs = z.leftCols(n);
        o.z_new = z.col(n);
        values[k] = (o.z_obs.leftCols(rank) * o.root_obs.transpose()).rowwise() + o.mean_obs.transpose();
    }
    fronts_.resize(n_samples);
    std::vector<Point2> pts(n);
    for (int s = 0; s < n_samples; ++s) {
        for (Eigen::Index i = 0; i < n; ++i) pts[i] = {values[0](s, i), values[1](s, i)};
        fronts_[s] = pareto_points(pts);
    }
}

void Nehvi::sample_at(const PerObjective& o, const gp::Vector& x, gp::Vector& out) const {
    const auto& m = *o.model;
    const gp::Matrix xq = x.transpose();
    const gp::Vector k_train_x = gp::kernel_matrix(m.inputs(), xq, m.params()).col(0);
    const gp::Vector v_x = m.factor().matrixL().solve(k_train_x);
    const double mean_x = k_train_x.dot(m.alpha());
    const double var_x = m.params().sigma * m.params().sigma - v_x.squaredNorm();
    const gp::Vector cross = gp::kernel_matrix(observed_, xq, m.params()).col(0) - o.v_obs.transpose() * v_x;
    const gp::Vector l = o.whiten * cross;
    const double rest = var_x - l.squaredNorm();
    out = (o.z_obs.leftCols(l.size()) * l).array() + mean_x;
    if (rest > o.floor) out += std::sqrt(rest) * o.z_new;
}

AcquisitionValue Nehvi::evaluate(const gp::Vector& x) const {
    if (x.size() != dims()) throw std::invalid_argument("acquisition point has the wrong dimension");
    gp::Vector f0, f1;
    sample_at(obj_[0], x, f0);
    sample_at(obj_[1], x, f1);
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < n_samples_; ++s) {
        const double h = hypervolume_improvement(fronts_[s], {f0(s), f1(s)}, r_);
        sum += h;
        sum2 += h * h;
    }
    AcquisitionValue v;
    v.mean = sum / n_samples_;
    if (n_samples_ > 1) {
        const double var = std::max(0.0, (sum2 - n_samples_ * v.mean * v.mean) / (n_samples_ - 1));
        v.std_error = std::sqrt(var / n_samples_);
    }
    return v;
}

double Nehvi::total_variance(const gp::Vector& x) const {
    const gp::Matrix xq = x.transpose();
    return obj_[0].model->posterior_variance(xq)(0) + obj_[1].model->posterior_variance(xq)(0);
}

namespace {

struct Local {
    gp::Vector x;
    double value;
    int evaluations;
};

Local pattern_search(const Nehvi& acq, gp::Vector x, double fx, const PatternSearchOptions& opt) {
    const Eigen::Index d = x.size();
    double step = opt.initial_step;
    int evals = 0;
    while (step >= opt.min_step && evals < opt.max_evaluations) {
        gp::Vector best_x = x;
        double best = fx;
        for (Eigen::Index i = 0; i < d; ++i) {
            for (double sign : {1.0, -1.0}) {
                gp::Vector y = x;
                y(i) = std::clamp(y(i) + sign * step, 0.0, 1.0);
                if (y(i) == x(i)) continue;
                const double fy = acq(y);
                ++evals;
                if (fy > best) {
                    best = fy;
                    best_x = y;
                }
            }
        }
        if (best > fx) {
            x = best_x;
            fx = best;
        } else {
            step *= 0.5;
        }
    }
    return {x, fx, evals};
}

}  // namespace

AcquisitionResult optimize_acquisition(const Nehvi& acq, const std::vector<gp::Vector>& incumbents, int restarts,
                                       std::uint64_t seed, const PatternSearchOptions& options) {
    if (restarts < 1) throw std::invalid_argument("acquisition optimization needs at least one restart");
    const auto d = static_cast<int>(acq.dims());
    std::vector<gp::Vector> starts;
    const gp::Matrix q = scrambled_halton(restarts, d, seed);
    for (int i = 0; i < restarts; ++i) starts.push_back(q.row(i).transpose());
    // Perturbation stream independent of the restart count.
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> g(0.0, 0.05);
    for (const auto& inc : incumbents) {
        gp::Vector p = inc;
        for (int i = 0; i < d; ++i) p(i) = std::clamp(p(i) + g(rng), 0.0, 1.0);
        starts.push_back(p);
    }

    AcquisitionResult res;
    res.value = -1.0;
    for (const auto& s : starts) {
        const double v = acq(s);
        ++res.evaluations;
        res.start_values.push_back(v);
        const auto local = pattern_search(acq, s, v, options);
        res.evaluations += local.evaluations;
        if (local.value > res.value) {
            res.value = local.value;
            res.x = local.x;
        }
    }
    if (res.value <= 0.0) {
        const gp::Matrix pool = scrambled_halton(256, d, seed + 1);
        double best = -1.0;
        for (Eigen::Index i = 0; i < pool.rows(); ++i) {
            const gp::Vector x = pool.row(i).transpose();
            const double v = acq.total_variance(x);
            if (v > best) {
                best = v;
                res.x = x;
            }
        }
        res.value = 0.0;
        res.exploration_fallback = true;
    }
    return res;
}

}  // namespace heatplan::moo
