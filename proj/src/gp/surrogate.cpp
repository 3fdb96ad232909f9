#include "heatplan/gp/surrogate.hpp"

#include <stdexcept>

namespace heatplan::gp {

InputScaler::InputScaler(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw std::invalid_argument("search bounds differ in dimension");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        if (!(upper(i) > lower(i))) throw std::invalid_argument("search upper bound must exceed lower bound");
}

Matrix InputScaler::to_unit(const Matrix& raw) const {
    if (raw.cols() != dims()) throw std::invalid_argument("point dimension does not match search bounds");
    const Eigen::RowVectorXd lo = lower.transpose();
    const Eigen::RowVectorXd span = (upper - lower).transpose();
    return (raw.rowwise() - lo).array().rowwise() / span.array();
}

Matrix InputScaler::from_unit(const Matrix& unit) const {
    if (unit.cols() != dims()) throw std::invalid_argument("point dimension does not match search bounds");
    const Eigen::RowVectorXd lo = lower.transpose();
    const Eigen::RowVectorXd span = (upper - lower).transpose();
    Matrix raw = unit.array().rowwise() * span.array();
    raw.rowwise() += lo;
    return raw;
}

TargetScaler TargetScaler::fit(const Vector& y) {
    TargetScaler s;
    if (y.size() == 0) return s;
    s.mean = y.mean();
    const double var = (y.array() - s.mean).square().sum() / static_cast<double>(y.size());
    s.std = var > 0.0 ? std::sqrt(var) : 1.0;
    if (!(y.maxCoeff() > y.minCoeff())) s.std = 1.0;
    return s;
}

Surrogate Surrogate::fit(const Matrix& X_raw, const Vector& y_raw, const InputScaler& inputs,
                         const SurrogateOptions& options) {
    if (X_raw.rows() != y_raw.size()) throw std::invalid_argument("surrogate inputs and targets differ in count");
    if (X_raw.rows() < 2) throw std::invalid_argument("surrogate needs at least two observations");
    Surrogate s;
    s.inputs_ = inputs;
    s.targets_ = TargetScaler::fit(y_raw);
    const Matrix X = inputs.to_unit(X_raw);
    const Vector y = s.targets_.to_standard(y_raw);

    double noise = options.noise.initial_std;
    FitOptions fo = options.fit;
    KernelParams params;
    for (int round = 0; round < std::max(1, options.rounds); ++round) {
        const auto fit = fit_hyperparameters(X, y, noise, fo);
        params = fit.params;
        fo.init = params;
        if (!options.estimate_noise) break;
        NoiseOptions no = options.noise;
        no.initial_std = std::max(noise, no.floor);
        const auto est = estimate_noise_std(X, y, params, no);
        noise = est.noise_std;
        if (!est.warning.empty()) s.warning_ = est.warning;
    }
    s.model_ = GpModel(X, y, params, noise);
    return s;
}

SurrogatePosterior Surrogate::posterior_standard(const Matrix& queries_raw) const {
    return model_.posterior(inputs_.to_unit(queries_raw));
}

SurrogatePosterior Surrogate::posterior_raw(const Matrix& queries_raw) const {
    auto p = posterior_standard(queries_raw);
    p.mean = targets_.to_raw(p.mean);
    p.cov *= targets_.std * targets_.std;
    return p;
}

}  // namespace heatplan::gp
