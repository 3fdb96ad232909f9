#include "heatplan/gp/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace heatplan::gp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bounds {
    Vector lo, hi;
    [[nodiscard]] Vector clip(const Vector& t) const { return t.cwiseMax(lo).cwiseMin(hi); }
};

KernelParams unpack(const Vector& theta, Smoothness nu) {
    KernelParams p;
    p.nu = nu;
    p.sigma = std::exp(theta(0));
    p.lengthscales = theta.tail(theta.size() - 1).array().exp();
    return p;
}

Vector pack(const KernelParams& p) {
    Vector t(1 + p.lengthscales.size());
    t(0) = std::log(p.sigma);
    t.tail(p.lengthscales.size()) = p.lengthscales.array().log();
    return t;
}

// Negative MLL and its gradient; +inf when the matrix will not factorize.
double objective(const Matrix& X, const Vector& y, double noise, const Vector& theta, Smoothness nu, Vector* grad) {
    try {
        const GpModel m(X, y, unpack(theta, nu), noise);
        const double v = -m.log_marginal_likelihood();
        if (!std::isfinite(v)) return kInf;
        if (grad) *grad = -m.hyper_gradient();
        return v;
    } catch (const std::runtime_error&) {
        return kInf;
    }
}

// Gradient with components pointing out of the box at an active bound removed.
Vector projected_gradient(const Vector& theta, const Vector& g, const Bounds& b) {
    Vector pg = g;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (theta(i) <= b.lo(i) + 1e-12 && g(i) > 0.0) pg(i) = 0.0;
        if (theta(i) >= b.hi(i) - 1e-12 && g(i) < 0.0) pg(i) = 0.0;
    }
    return pg;
}

struct LocalResult {
    Vector theta;
    double value{kInf};
};

LocalResult bfgs(const Matrix& X, const Vector& y, double noise, Vector theta, Smoothness nu, const Bounds& b,
                 int max_iter) {
    const Eigen::Index n = theta.size();
    theta = b.clip(theta);
    Vector g;
    double f = objective(X, y, noise, theta, nu, &g);
    if (!std::isfinite(f)) return {theta, kInf};
    Matrix H = Matrix::Identity(n, n);
    for (int it = 0; it < max_iter; ++it) {
        const Vector pg = projected_gradient(theta, g, b);
        if (pg.lpNorm<Eigen::Infinity>() < 1e-6) break;
        Vector d = -H * pg;
        // Components stuck at a bound are frozen for this step.
        for (Eigen::Index i = 0; i < n; ++i)
            if (pg(i) == 0.0) d(i) = 0.0;
        if (d.dot(pg) >= 0.0) {
            H.setIdentity();
            d = -pg;
        }
        // Cap the step to avoid overflowing exp() on the first iterations.
        const double dn = d.lpNorm<Eigen::Infinity>();
        if (dn > 2.0) d *= 2.0 / dn;
        double t = 1.0;
        Vector next, gn;
        double fn = kInf;
        bool ok = false;
        for (int ls = 0; ls < 30; ++ls) {
            next = b.clip(theta + t * d);
            fn = objective(X, y, noise, next, nu, &gn);
            if (std::isfinite(fn) && fn <= f + 1e-4 * g.dot(next - theta)) {
                ok = true;
                break;
            }
            t *= 0.5;
        }
        if (!ok) break;
        const Vector s = next - theta;
        const Vector yk = gn - g;
        const double sy = s.dot(yk);
        const double change = f - fn;
        theta = next;
        g = gn;
        f = fn;
        if (sy > 1e-10) {
            const double rho = 1.0 / sy;
            const Matrix I = Matrix::Identity(n, n);
            H = (I - rho * s * yk.transpose()) * H * (I - rho * yk * s.transpose()) + rho * s * s.transpose();
        }
        if (change < 1e-10 * std::max(1.0, std::abs(f))) break;
    }
    return {theta, f};
}

}  // namespace

FitResult fit_hyperparameters(const Matrix& X, const Vector& y, double noise_std, const FitOptions& options) {
    if (X.rows() < 2) throw std::invalid_argument("hyperparameter fit needs at least two observations");
    if (X.rows() != y.size()) throw std::invalid_argument("GP inputs and targets differ in count");
    if (options.nus.empty()) throw std::invalid_argument("no smoothness candidates given");
    const Eigen::Index dims = X.cols();
    Bounds b;
    b.lo = Vector::Constant(1 + dims, std::log(options.lengthscale_min));
    b.hi = Vector::Constant(1 + dims, std::log(options.lengthscale_max));
    b.lo(0) = std::log(options.sigma_min);
    b.hi(0) = std::log(options.sigma_max);

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    FitResult best;
    best.mll = -kInf;
    bool found = false;
    for (Smoothness nu : options.nus) {
        std::vector<Vector> starts;
        Vector def(1 + dims);
        def(0) = 0.0;
        def.tail(dims).setConstant(std::log(0.5));
        starts.push_back(def);
        if (options.init) {
            KernelParams p = *options.init;
            p.validate(dims);
            starts.push_back(pack(p));
        }
        for (int r = 0; r < options.random_starts; ++r) {
            Vector s(1 + dims);
            s(0) = std::log(0.3) + u01(rng) * (std::log(3.0) - std::log(0.3));
            for (Eigen::Index i = 0; i < dims; ++i) s(1 + i) = std::log(0.05) + u01(rng) * (std::log(2.0) - std::log(0.05));
            starts.push_back(s);
        }
        for (const auto& s : starts) {
            const double f0 = objective(X, y, noise_std, b.clip(s), nu, nullptr);
            if (!std::isfinite(f0)) {
                ++best.failed_starts;
                continue;
            }
            best.start_mll.push_back(-f0);
            const auto local = bfgs(X, y, noise_std, s, nu, b, options.max_iterations);
            if (!std::isfinite(local.value)) continue;
            if (!found || -local.value > best.mll) {
                found = true;
                best.mll = -local.value;
                best.params = unpack(local.theta, nu);
            }
        }
    }
    if (!found) throw std::runtime_error("hyperparameter fit failed: no start gave a positive definite kernel");
    return best;
}

NoiseEstimate estimate_noise_std(const Matrix& X, const Vector& y, const KernelParams& params,
                                 const NoiseOptions& options) {
    if (X.rows() < 2) throw std::invalid_argument("noise estimation needs at least two observations");
    if (!(options.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(options.initial_std > 0.0)) throw std::invalid_argument("initial noise std must be positive");
    const double u_floor = 2.0 * std::log(options.floor);

    auto eval = [&](double u, double* grad_u) {
        const GpModel m(X, y, params, std::exp(0.5 * u));
        if (grad_u) *grad_u = m.noise_variance_gradient() * std::exp(u);
        return m.log_marginal_likelihood();
    };

    NoiseEstimate out;
    double u = std::max(2.0 * std::log(options.initial_std), u_floor);
    double g = 0.0;
    double mll = eval(u, &g);
    double step = options.learning_rate;
    int decreasing = 0;
    double best_u = u, best_mll = mll;
    for (int it = 0; it < options.max_iterations; ++it) {
        out.iterations = it + 1;
        if (std::abs(g) < options.tolerance) {
            out.converged = true;
            break;
        }
        if (u <= u_floor && g < 0.0) {
            out.converged = true;
            break;
        }
        bool accepted = false;
        double un = u, gn = 0.0, mn = mll;
        for (int ls = 0; ls < 40; ++ls) {
            un = std::max(u + step * g, u_floor);
            try {
                mn = eval(un, &gn);
            } catch (const std::runtime_error&) {
                mn = -kInf;
            }
            if (mn >= mll) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            out.converged = true;
            break;
        }
        const double change = mn - mll;
        decreasing = change < 0.0 ? decreasing + 1 : 0;
        u = un;
        g = gn;
        mll = mn;
        if (mll > best_mll) {
            best_mll = mll;
            best_u = u;
        }
        step *= 2.0;
        if (decreasing >= 10) {
            out.warning = "noise estimation diverged; returning best iterate";
            break;
        }
        if (change < options.tolerance) {
            // A flat likelihood while the gradient still points down means the
            // noise is below what the data can resolve: settle on the floor.
            if (g < 0.0 && u > u_floor) {
                try {
                    const double mf = eval(u_floor, nullptr);
                    if (mf >= mll - options.tolerance) {
                        u = u_floor;
                        mll = mf;
                        if (mll > best_mll) best_mll = mll, best_u = u;
                    }
                } catch (const std::runtime_error&) {
                }
            }
            out.converged = true;
            break;
        }
    }
    if (!out.converged && out.warning.empty()) out.warning = "noise estimation hit the iteration limit";
    out.noise_std = std::max(std::exp(0.5 * best_u), options.floor);
    out.mll = best_mll;
    return out;
}

}  // namespace heatplan::gp
