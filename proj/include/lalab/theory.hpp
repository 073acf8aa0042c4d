#pragma once

#include "lalab/model.hpp"

#include <Eigen/Core>

namespace lalab {

class ConfigFile;

/// Inputs of the asymptotic risk predictors: the dimension ratios
/// psi_d = d/n, psi_p = p/n plus the scalar model parameters.
struct TheoryParams {
    double psi_d = 0.0;
    double psi_p = 0.0;
    double sigma = 0.0;
    double r_s = 0.0;
    double r_ns = 0.0;
    double rho = 0.0;
    double mu = 0.0;
    Eigen::VectorXd priors;
    double pole_margin = kDefaultPoleMargin;

    void validate() const;
    bool balanced() const;
    Eigen::Index k() const { return priors.size(); }

    /// Canonical alignment vector U_s^T theta0_s with the rho-weighted
    /// energy spread evenly over clusters. For balanced priors every
    /// prediction depends on the alignment only through its norm, so this
    /// choice is exact; for unbalanced priors pass the true vector instead.
    Eigen::VectorXd default_alignment() const;

    static TheoryParams from(const ProblemConfig& cfg);
    static TheoryParams from_config(const ConfigFile& cf);
};

struct TheoryPrediction {
    double risk = 0.0;
    Eigen::VectorXd alpha;  // empty for closed-form branches
    double gamma0_sq = 0.0; // 0 for closed-form branches
    Regime regime = Regime::Under;
};

/// Asymptotic risk of the look-alike estimator when the anonymized design
/// still has more samples than effective dimensions (psi_d - psi_p < 1):
///   (sigma^2 + r_s^2) / (1 - (psi_d - psi_p)) - rho r_s^2.
/// Cluster priors, mu and r_ns provably drop out of this branch.
double risk_lookalike_under(const TheoryParams& tp);

/// Asymptotic risk of the look-alike estimator in the interpolating
/// regime (psi_d - psi_p > 1), for orthogonal equal-energy centers:
///   alpha     = (I + mu^2 diag(pi) / (g - 1))^{-1} ut,       g = psi_d - psi_p
///   gamma0^2  = (sigma^2 + r_s^2 + mu^2 alpha' diag(pi) alpha) / (g - 1)
///               + (1 - 1/g) r_ns^2
///   risk      = sigma^2 + (1 - rho) r_s^2 + gamma0^2
///               + alpha' (I + mu^2 diag(pi)) alpha
/// where ut = U_s^T theta0_s must have norm sqrt(rho) * r_s.
TheoryPrediction risk_lookalike_over(const TheoryParams& tp, const Eigen::VectorXd& ut_theta0s);

/// Asymptotic risk of the plain min-norm estimator. Underparametrized
/// branch (psi_d < 1): sigma^2 / (1 - psi_d), independent of every other
/// parameter. Overparametrized branch (psi_d > 1):
///   alpha~    = (I + (I + mu^2 diag(pi)) / (psi_d - 1))^{-1} ut
///   gamma~0^2 = (sigma^2 + alpha~' (I + mu^2 diag(pi)) alpha~) / (psi_d - 1)
///               + (1 - 1/psi_d) ((1 - rho) r_s^2 + r_ns^2)
///   risk      = sigma^2 + gamma~0^2 + alpha~' (I + mu^2 diag(pi)) alpha~
TheoryPrediction risk_minnorm(const TheoryParams& tp, const Eigen::VectorXd& ut_theta0s);

/// Dispatching helpers returning just the risk value for the regime the
/// parameters fall in. Throw NumericalError inside the pole margin.
double lookalike_prediction(const TheoryParams& tp, const Eigen::VectorXd& ut_theta0s);
double minnorm_prediction(const TheoryParams& tp, const Eigen::VectorXd& ut_theta0s);

/// Largest squared signal-to-noise ratio (r_s/sigma)^2 for which the
/// look-alike estimator is guaranteed not to lose in the mixed regime
/// psi_d > 1, psi_d - psi_p < 1 (balanced priors):
///   (1 + (psi_d-1)^{-1} - (1-psi_d+psi_p)^{-1})
///   / ((1-psi_d+psi_p)^{-1} + psi_d^{-1} - 1).
double gain_threshold_case2(double psi_d, double psi_p);

/// Gain of anonymization: (min-norm risk) / (look-alike risk), each side
/// evaluated with the predictor matching its own regime.
double gain_theory(const TheoryParams& tp, const Eigen::VectorXd& ut_theta0s);

/// default_alignment() convenience overloads.
TheoryPrediction risk_lookalike_over(const TheoryParams& tp);
TheoryPrediction risk_minnorm(const TheoryParams& tp);
double gain_theory(const TheoryParams& tp);

} // namespace lalab
