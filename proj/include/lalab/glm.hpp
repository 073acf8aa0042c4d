#pragma once

#include "lalab/estimators.hpp"
#include "lalab/model.hpp"
#include "lalab/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lalab {

class ConfigFile;

/// Binomial-response experiment configuration.
struct GlmConfig {
    ProblemConfig base;
    int trials = 1000;  // binomial trial count per response
    int n_test = 50000; // fixed test-set size per replicate

    void validate() const;
    static GlmConfig from_config(const ConfigFile& cf);
};

/// Counts y ~ Binomial(trials, p_x) with p_x = logistic(<x, theta0> - eps),
/// eps ~ N(0, sigma^2) drawn fresh per sample. p_true keeps the realized
/// success probabilities so probability-scale errors can be evaluated.
struct GlmSample {
    Eigen::MatrixXd X;      // d x n
    Eigen::VectorXd counts; // n, integer-valued
    Eigen::VectorXi labels; // n
    Eigen::VectorXd p_true; // n
    int k = 0;
    int p = 0;
};

GlmSample sample_glm(const GlmConfig& cfg, const GroundTruth& gt, Rng& rng, int n_override = 0);

/// Binomial log-likelihood with logit link, dropping the combinatorial
/// constant: sum_i counts_i * eta_i - trials * softplus(eta_i).
double glm_log_likelihood(const Eigen::MatrixXd& design, const Eigen::VectorXd& counts,
                          int trials, const Eigen::VectorXd& theta);

/// Newton / IRLS maximum-likelihood fit with step halving. Each step
/// solves the weighted normal equations through a truncated
/// eigendecomposition of the weighted Gram with a small diagonal floor,
/// which reduces to the minimum-norm step when the Gram is rank-deficient.
/// Non-convergence is flagged on the returned model, not thrown.
/// ll_trace, when given, receives the accepted log-likelihood after every
/// iteration (a nondecreasing sequence).
FittedModel glm_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& counts, int trials,
                    int max_iter = 100, double tol = 1e-8,
                    std::vector<double>* ll_trace = nullptr);

/// One aggregated output row of the gain experiment at a given r_s.
/// log-gain = log(test risk of the raw fit / test risk of the anonymized
/// fit), under the response-scale metric mean((y/N - p_hat)^2) and the
/// probability-scale metric mean((p_true - p_hat)^2).
struct GlmGainRow {
    double r_s = 0.0;
    double mean_log_gain = 0.0;
    double stderr_log_gain = 0.0;
    double mean_log_gain_prob = 0.0;
    double stderr_log_gain_prob = 0.0;
    int replicates = 0;
};

std::vector<GlmGainRow> glm_gain_experiment(const GlmConfig& cfg,
                                            const std::vector<double>& r_s_grid, int replicates,
                                            std::uint64_t seed, int threads = 0);

/// The experiment defaults: n=200, d=180, p=30, k=3, mu=5, sigma=1,
/// rho=0.3, r_ns=2, trials=1000, n_test=50000.
GlmConfig default_glm_config();

/// Default r_s grid {0.1, 0.3, ..., 1.9}.
std::vector<double> default_glm_r_s_grid();

} // namespace lalab
