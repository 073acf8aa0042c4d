#pragma once

#include "lalab/model.hpp"
#include "lalab/rng.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace lalab {

struct RiskReport {
    double risk_closed_form = 0.0;
    std::optional<double> risk_monte_carlo;
    std::optional<double> mc_std_error;
    std::optional<double> theory_prediction;
    std::optional<std::string> gain_vs; // name of the reference estimator
    std::optional<double> gain_value;
};

/// Exact out-of-sample risk of a model under the generative mixture:
///   sigma^2 + |theta0 - theta|^2 + (theta0 - theta)^T M diag(pi) M^T (theta0 - theta).
double risk_closed_form(const Eigen::VectorXd& theta, const GroundTruth& gt,
                        const ProblemConfig& cfg);

struct McRisk {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean squared prediction error over n_test fresh draws from the
/// generative model, with the standard error of that mean.
McRisk risk_monte_carlo(const Eigen::VectorXd& theta, const GroundTruth& gt,
                        const ProblemConfig& cfg, int n_test, Rng& rng);

/// Gain of the look-alike estimator: risk_ref / risk_lookalike.
double gain(double risk_ref, double risk_lookalike);

} // namespace lalab
