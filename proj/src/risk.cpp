#include "lalab/risk.hpp"

#include "lalab/errors.hpp"

#include <cmath>

namespace lalab {

double risk_closed_form(const Eigen::VectorXd& theta, const GroundTruth& gt,
                        const ProblemConfig& cfg) {
    if (theta.size() != gt.d())
        throw ConfigError("risk_closed_form: theta length must equal d");
    const Eigen::VectorXd diff = gt.theta0() - theta;
    const Eigen::VectorXd mt = gt.M.transpose() * diff; // length k
    double quad = 0.0;
    for (Eigen::Index l = 0; l < mt.size(); ++l) quad += cfg.priors[l] * mt[l] * mt[l];
    return cfg.sigma * cfg.sigma + diff.squaredNorm() + quad;
}

McRisk risk_monte_carlo(const Eigen::VectorXd& theta, const GroundTruth& gt,
                        const ProblemConfig& cfg, int n_test, Rng& rng) {
    if (n_test < 2) throw ConfigError("risk_monte_carlo: n_test must be >= 2");
    if (theta.size() != gt.d())
        throw ConfigError("risk_monte_carlo: theta length must equal d");

    const Eigen::VectorXd theta0 = gt.theta0();
    const Eigen::Index d = gt.d();
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd x(d);
    for (int t = 0; t < n_test; ++t) {
        const int label = rng.categorical(cfg.priors);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = rng.normal();
        x += gt.M.col(label);
        double y = x.dot(theta0);
        if (cfg.sigma > 0.0) y += cfg.sigma * rng.normal();
        const double err = y - x.dot(theta);
        const double sq = err * err;
        sum += sq;
        sum_sq += sq * sq;
    }
    McRisk out;
    out.mean = sum / n_test;
    const double var = (sum_sq - sum * sum / n_test) / (n_test - 1);
    out.std_error = std::sqrt(std::max(var, 0.0) / n_test);
    return out;
}

double gain(double risk_ref, double risk_lookalike) {
    if (!(risk_lookalike > 0.0))
        throw NumericalError("gain: look-alike risk must be > 0");
    return risk_ref / risk_lookalike;
}

} // namespace lalab
