#include "heatplan/gp/fit.hpp"
#include "heatplan/gp/surrogate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace heatplan::gp;

namespace {

KernelParams iso(double sigma, double ell, Smoothness nu, Eigen::Index dims = 1) {
    KernelParams p;
    p.sigma = sigma;
    p.nu = nu;
    p.lengthscales = Vector::Constant(dims, ell);
    return p;
}

Matrix uniform_points(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = u(rng);
    return X;
}

// Draw from the GP prior at X, plus iid noise.
Vector prior_draw(const Matrix& X, const KernelParams& p, double noise, std::uint64_t seed) {
    Matrix K = kernel_matrix(X, X, p);
    const auto f = factorize_with_jitter(K);
    const Matrix L = f.llt.matrixL();
    const Matrix z = standard_normals(X.rows(), 2, seed);
    return L * z.col(0) + noise * z.col(1);
}

}  // namespace

TEST_CASE("matern kernel closed forms") {
    Vector x(2), y(2);
    x << 0.3, -1.0;
    y << 0.3, -1.0;
    for (auto nu : {Smoothness::half, Smoothness::three_halves, Smoothness::five_halves})
        CHECK(matern_kernel(x, x, iso(1.7, 0.4, nu, 2)) == doctest::Approx(1.7 * 1.7).epsilon(1e-14));

    Vector a(1), b(1);
    a << 0.0;
    b << 1.0;
    CHECK(matern_kernel(a, b, iso(1.0, 1.0, Smoothness::half)) == doctest::Approx(0.367879441171).epsilon(1e-10));
    // r = 1: (1 + sqrt3) e^-sqrt3 and (1 + sqrt5 + 5/3) e^-sqrt5
    CHECK(matern_kernel(a, b, iso(1.0, 1.0, Smoothness::three_halves)) ==
          doctest::Approx((1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0))).epsilon(1e-12));
    CHECK(matern_kernel(a, b, iso(1.0, 1.0, Smoothness::five_halves)) ==
          doctest::Approx((1.0 + std::sqrt(5.0) + 5.0 / 3.0) * std::exp(-std::sqrt(5.0))).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    KernelParams p = iso(1.3, 0.0, Smoothness::three_halves, 3);
    p.lengthscales << 0.2, 1.0, 3.0;
    for (int k = 0; k < 20; ++k) {
        Vector u(3), v(3);
        for (int i = 0; i < 3; ++i) u(i) = g(rng), v(i) = g(rng);
        CHECK(matern_kernel(u, v, p) == matern_kernel(v, u, p));
    }

    CHECK_THROWS_AS((void)parse_smoothness("2"), std::invalid_argument);
    CHECK_THROWS_AS((void)smoothness_from_value(1.0), std::invalid_argument);
    CHECK(parse_smoothness("3/2") == Smoothness::three_halves);
    CHECK_THROWS_AS((void)matern_kernel(a, x, iso(1.0, 1.0, Smoothness::half)), std::invalid_argument);
    KernelParams bad = iso(-1.0, 1.0, Smoothness::half);
    CHECK_THROWS_AS(bad.validate(1), std::invalid_argument);
}

TEST_CASE("length-scale gradient matches finite differences") {
    const Matrix X = uniform_points(6, 2, 11);
    for (auto nu : {Smoothness::half, Smoothness::three_halves, Smoothness::five_halves}) {
        KernelParams p = iso(1.2, 0.0, nu, 2);
        p.lengthscales << 0.3, 0.8;
        for (Eigen::Index d = 0; d < 2; ++d) {
            const Matrix G = kernel_lengthscale_gradient(X, p, d);
            const double h = 1e-6;
            KernelParams up = p, dn = p;
            up.lengthscales(d) *= std::exp(h);
            dn.lengthscales(d) *= std::exp(-h);
            const Matrix fd = (kernel_matrix(X, X, up) - kernel_matrix(X, X, dn)) / (2.0 * h);
            CHECK((G - fd).cwiseAbs().maxCoeff() < 1e-7);
        }
    }
}

TEST_CASE("log marginal likelihood scalar and 2x2 cases") {
    Matrix X(1, 1);
    X << 0.0;
    Vector y(1);
    y << 0.0;
    GpModel m0(X, y, iso(1.0, 1.0, Smoothness::five_halves), 0.0);
    CHECK(m0.log_marginal_likelihood() == doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
    CHECK(m0.log_marginal_likelihood() == doctest::Approx(-0.918939).epsilon(1e-6));
    y << 1.0;
    GpModel m1(X, y, iso(1.0, 1.0, Smoothness::five_halves), 0.0);
    CHECK(m1.log_marginal_likelihood() == doctest::Approx(-0.5 - 0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));

    // Two points at distance 0.5, nu = 1/2, sigma = 2, l = 1, noise 0.3.
    Matrix X2(2, 1);
    X2 << 0.1, 0.6;
    Vector y2(2);
    y2 << 1.5, -0.4;
    const double s2 = 4.0, n2 = 0.09;
    const double a = s2 + n2, b = s2 * std::exp(-0.5);
    const double det = a * a - b * b;
    // inverse [[a, -b], [-b, a]] / det
    const double quad = (a * y2(0) * y2(0) - 2.0 * b * y2(0) * y2(1) + a * y2(1) * y2(1)) / det;
    const double expected = -0.5 * quad - 0.5 * std::log(det) - std::log(2.0 * M_PI);
    GpModel m2(X2, y2, iso(2.0, 1.0, Smoothness::half), 0.3);
    CHECK(std::abs(m2.log_marginal_likelihood() - expected) < 1e-10);
    CHECK(m2.jitter() == 0.0);
}

TEST_CASE("posterior on two points matches hand algebra") {
    Matrix X(2, 1);
    X << 0.0, 1.0;
    Vector y(2);
    y << 0.7, -1.1;
    Matrix q(1, 1);
    q << 0.4;
    const double sigma = 1.5, noise = 0.2;
    const double s2 = sigma * sigma;
    const double k01 = s2 * std::exp(-1.0), kq0 = s2 * std::exp(-0.4), kq1 = s2 * std::exp(-0.6);
    const double a = s2 + noise * noise;
    const double det = a * a - k01 * k01;
    const double i00 = a / det, i01 = -k01 / det;
    const double w0 = kq0 * i00 + kq1 * i01, w1 = kq0 * i01 + kq1 * i00;
    const double mean = w0 * y(0) + w1 * y(1);
    const double var = s2 - (w0 * kq0 + w1 * kq1);

    GpModel m(X, y, iso(sigma, 1.0, Smoothness::half), noise);
    const auto post = m.posterior(q);
    CHECK(std::abs(post.mean(0) - mean) < 1e-10);
    CHECK(std::abs(post.cov(0, 0) - var) < 1e-10);
    CHECK(std::abs(m.posterior_mean(q)(0) - mean) < 1e-10);
    CHECK(std::abs(m.posterior_variance(q)(0) - var) < 1e-10);
    CHECK(std::abs(m.posterior_cross(q, q)(0, 0) - var) < 1e-10);
}

TEST_CASE("posterior interpolation and prior reversion") {
    const Matrix X = uniform_points(8, 2, 5);
    const Vector y = prior_draw(X, iso(1.0, 0.4, Smoothness::five_halves, 2), 0.0, 6);
    GpModel m(X, y, iso(1.0, 0.4, Smoothness::three_halves, 2), 0.0);
    const auto at_train = m.posterior(X);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(at_train.mean(i) - y(i)) < 1e-8);
        CHECK(at_train.cov(i, i) <= 1e-8 + m.jitter());
    }
    Matrix far(1, 2);
    far << 10.0, 10.0;  // >= 10 l from every point
    const auto p = m.posterior(far);
    CHECK(std::abs(p.mean(0)) < 1e-6);
    CHECK(p.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("posterior variance bounds and monotone shrinkage") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 5;
        const Matrix Xall = uniform_points(n + 1, 2, 100 + trial);
        const Vector yall = prior_draw(Xall, iso(1.0, 0.3, Smoothness::five_halves, 2), 0.05, 200 + trial);
        const auto nu = static_cast<Smoothness>(trial % 3);
        const KernelParams p = iso(0.5 + u(rng), 0.1 + 0.5 * u(rng), nu, 2);
        const double noise = 0.01 + 0.2 * u(rng);
        GpModel small(Xall.topRows(n), yall.head(n), p, noise);
        GpModel big(Xall, yall, p, noise);
        const Matrix Q = uniform_points(15, 2, 300 + trial);
        const Vector vs = small.posterior_variance(Q), vb = big.posterior_variance(Q);
        for (int i = 0; i < Q.rows(); ++i) {
            CHECK(vs(i) >= -1e-8);
            CHECK(vs(i) <= p.sigma * p.sigma + 1e-8);
            CHECK(vb(i) <= vs(i) + 1e-6);
        }
    }
}

TEST_CASE("noise-variance gradient matches central differences") {
    const Matrix X = uniform_points(12, 2, 21);
    const KernelParams p = iso(1.1, 0.35, Smoothness::five_halves, 2);
    const Vector y = prior_draw(X, p, 0.1, 22);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1.0));
    for (int k = 0; k < 10; ++k) {
        const double sn = std::exp(u(rng));
        const double v = sn * sn;
        const double h = 1e-3 * v;
        const double up = GpModel(X, y, p, std::sqrt(v + h)).log_marginal_likelihood();
        const double dn = GpModel(X, y, p, std::sqrt(v - h)).log_marginal_likelihood();
        const double fd = (up - dn) / (2.0 * h);
        const double an = GpModel(X, y, p, sn).noise_variance_gradient();
        CHECK(std::abs(an - fd) <= 1e-4 * std::max(std::abs(fd), 1e-8));
    }
}

TEST_CASE("kernel hyperparameter gradient matches central differences") {
    const Matrix X = uniform_points(10, 2, 31);
    KernelParams p = iso(0.8, 0.0, Smoothness::three_halves, 2);
    p.lengthscales << 0.25, 0.6;
    const Vector y = prior_draw(X, p, 0.05, 32);
    for (auto nu : {Smoothness::half, Smoothness::three_halves, Smoothness::five_halves}) {
        p.nu = nu;
        const Vector g = GpModel(X, y, p, 0.05).hyper_gradient();
        const double h = 1e-6;
        for (int i = 0; i < 3; ++i) {
            KernelParams up = p, dn = p;
            if (i == 0) {
                up.sigma *= std::exp(h);
                dn.sigma *= std::exp(-h);
            } else {
                up.lengthscales(i - 1) *= std::exp(h);
                dn.lengthscales(i - 1) *= std::exp(-h);
            }
            const double fd = (GpModel(X, y, up, 0.05).log_marginal_likelihood() -
                               GpModel(X, y, dn, 0.05).log_marginal_likelihood()) /
                              (2.0 * h);
            CHECK(std::abs(g(i) - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("posterior samples") {
    const Matrix X = uniform_points(6, 1, 41);
    const KernelParams p = iso(1.0, 0.3, Smoothness::five_halves);
    const Vector y = prior_draw(X, p, 0.1, 42);
    GpModel m(X, y, p, 0.1);
    Matrix q(1, 1);
    q << 0.37;
    const auto post = m.posterior(q);
    const Matrix S = m.sample_posterior(q, 10000, 7);
    const double sd = std::sqrt(post.cov(0, 0));
    CHECK(std::abs(S.col(0).mean() - post.mean(0)) < 3.0 * sd / 100.0);
    CHECK(m.sample_posterior(q, 50, 9) == m.sample_posterior(q, 50, 9));
    CHECK(m.sample_posterior(q, 50, 9) != m.sample_posterior(q, 50, 10));

    // Joint moments at three points.
    Matrix q3(3, 1);
    q3 << 0.1, 0.15, 0.8;
    const auto p3 = m.posterior(q3);
    const Matrix S3 = m.sample_posterior(q3, 20000, 8);
    const Eigen::RowVectorXd mu = S3.colwise().mean();
    const Matrix C = (S3.rowwise() - mu).transpose() * (S3.rowwise() - mu) / 19999.0;
    CHECK((C - p3.cov).cwiseAbs().maxCoeff() < 0.05 * p3.cov.diagonal().maxCoeff());

    // Interpolating model: zero posterior variance at a training point.
    GpModel exact(X, y, p, 0.0);
    const Matrix at = X.row(2);
    const Matrix Se = exact.sample_posterior(at, 200, 3);
    CHECK((Se.array() - y(2)).abs().maxCoeff() < 1e-4);
    CHECK_THROWS_AS((void)m.sample_posterior(q, 0, 1), std::invalid_argument);
}

TEST_CASE("jitter ladder") {
    Matrix K = Matrix::Ones(3, 3);  // rank one
    const auto f = factorize_with_jitter(K);
    CHECK(f.jitter > 0.0);
    CHECK(f.jitter <= 1e-4);
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS((void)factorize_with_jitter(bad), std::runtime_error);
}

TEST_CASE("noise recovery on synthetic data") {
    const Matrix X = uniform_points(60, 1, 51);
    const KernelParams truth = iso(1.0, 0.2, Smoothness::five_halves);
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Vector y = prior_draw(X, truth, 0.1, 500 + seed);
        double noise = 0.1;
        FitOptions fo;
        fo.seed = seed;
        KernelParams params;
        for (int round = 0; round < 2; ++round) {
            params = fit_hyperparameters(X, y, noise, fo).params;
            fo.init = params;
            noise = estimate_noise_std(X, y, params).noise_std;
        }
        MESSAGE("seed " << seed << " noise " << noise << " l " << params.lengthscales(0));
        if (noise >= 0.05 && noise <= 0.2) ++inside;
        // Oracle kernel: the estimate alone.
        const auto est = estimate_noise_std(X, y, truth);
        CHECK(est.noise_std >= 0.05);
        CHECK(est.noise_std <= 0.2);
        CHECK(est.warning.empty());
    }
    CHECK(inside == 5);
}

TEST_CASE("noiseless targets drive the noise to the floor") {
    Matrix X(15, 1);
    for (int i = 0; i < 15; ++i) X(i, 0) = i / 14.0;
    Vector y(15);
    for (int i = 0; i < 15; ++i) y(i) = std::sin(3.0 * X(i, 0));
    const auto fit = fit_hyperparameters(X, y, 1e-3);
    const auto est = estimate_noise_std(X, y, fit.params);
    CHECK(est.noise_std == doctest::Approx(1e-6).epsilon(1e-9));
    CHECK(std::isfinite(est.mll));
}

TEST_CASE("hyperparameter fit") {
    SUBCASE("length scale recovery") {
        const KernelParams truth = iso(1.0, 0.3, Smoothness::five_halves);
        Matrix X(40, 1);
        for (int i = 0; i < 40; ++i) X(i, 0) = (i + 0.5) / 40.0;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const Vector y = prior_draw(X, truth, 0.01, 60 + seed);
            // Length scales are only comparable at the generating smoothness.
            FitOptions fo;
            fo.seed = seed;
            fo.nus = {Smoothness::five_halves};
            const auto fit = fit_hyperparameters(X, y, 0.01, fo);
            CHECK(fit.params.lengthscales(0) > 0.15);
            CHECK(fit.params.lengthscales(0) < 0.6);
            for (double s : fit.start_mll) CHECK(fit.mll >= s);
            // Deterministic per seed.
            const auto again = fit_hyperparameters(X, y, 0.01, fo);
            CHECK(again.mll == fit.mll);
            CHECK(again.params.lengthscales == fit.params.lengthscales);
            // Selecting over all three smoothness values can only improve the MLL.
            const auto all = fit_hyperparameters(X, y, 0.01, FitOptions{.seed = seed});
            CHECK(all.mll >= fit.mll - 1e-9);
        }
    }
    SUBCASE("constant targets") {
        const Matrix X = uniform_points(10, 2, 71);
        const Vector y = Vector::Zero(10);
        const auto fit = fit_hyperparameters(X, y, 0.1);
        CHECK(fit.params.sigma == doctest::Approx(1e-3).epsilon(1e-6));
        CHECK(std::isfinite(fit.mll));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS((void)fit_hyperparameters(Matrix::Zero(1, 1), Vector::Zero(1), 0.1), std::invalid_argument);
        CHECK_THROWS_AS((void)estimate_noise_std(Matrix::Zero(1, 1), Vector::Zero(1), iso(1, 1, Smoothness::half)),
                        std::invalid_argument);
    }
}

TEST_CASE("surrogate standardization round trip") {
    const Matrix U = uniform_points(20, 2, 81);
    Vector lo(2), hi(2);
    lo << -5.0, 100.0;
    hi << 5.0, 400.0;
    const InputScaler scaler(lo, hi);
    const Matrix Xraw = scaler.from_unit(U);
    CHECK((scaler.to_unit(Xraw) - U).cwiseAbs().maxCoeff() < 1e-12);
    Vector yraw(20);
    for (int i = 0; i < 20; ++i) yraw(i) = 1e5 + 3e3 * std::sin(Xraw(i, 0)) + 0.01 * Xraw(i, 1) * Xraw(i, 1);

    const auto s = Surrogate::fit(Xraw, yraw, scaler);
    const Matrix Q = scaler.from_unit(uniform_points(7, 2, 82));
    const auto raw = s.posterior_raw(Q);

    // Direct computation on centred raw targets with the kernel scaled by std.
    const auto& t = s.targets();
    KernelParams p = s.model().params();
    p.sigma *= t.std;
    GpModel direct(U, yraw.array() - t.mean, p, s.noise_std() * t.std);
    const auto d = direct.posterior(scaler.to_unit(Q));
    for (int i = 0; i < 7; ++i) {
        CHECK(std::abs(raw.mean(i) - (d.mean(i) + t.mean)) < 1e-8 * std::abs(t.mean));
        CHECK(std::abs(raw.cov(i, i) - d.cov(i, i)) < 1e-8 * t.std * t.std);
    }

    const auto flat = Surrogate::fit(Xraw, Vector::Constant(20, 42.0), scaler);
    CHECK(flat.targets().std == 1.0);
    CHECK(flat.posterior_raw(Q).mean(0) == doctest::Approx(42.0));
    CHECK_THROWS_AS((void)InputScaler(hi, lo), std::invalid_argument);
}
