#include "lalab/glm.hpp"

#include "lalab/errors.hpp"
#include "lalab/model.hpp"
#include "lalab/rng.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <cmath>

using namespace lalab;

namespace {

GlmConfig tiny_glm_config() {
    GlmConfig cfg;
    cfg.base.n = 400;
    cfg.base.d = 10;
    cfg.base.p = 4;
    cfg.base.k = 2;
    cfg.base.mu = 1.0;
    cfg.base.sigma = 0.0;
    cfg.base.r_s = 0.5;
    cfg.base.r_ns = 0.5;
    cfg.base.rho = 0.5;
    cfg.base.priors = Eigen::VectorXd::Constant(2, 0.5);
    cfg.trials = 50;
    cfg.n_test = 2000;
    return cfg;
}

} // namespace

TEST_SUITE_BEGIN("glm");

TEST_CASE("zero model and zero noise give coin-flip probabilities") {
    GlmConfig cfg = tiny_glm_config();
    cfg.base.mu = 0.0;
    cfg.base.r_s = 0.0;
    cfg.base.r_ns = 0.0;
    cfg.base.n = 2000;
    cfg.trials = 100;
    Rng rng(61);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    CHECK((sample.p_true.array() == 0.5).all());
    const double mean_frac = sample.counts.sum() / (double(cfg.trials) * cfg.base.n);
    const double slack = 3.0 * std::sqrt(0.25 / (double(cfg.base.n) * cfg.trials));
    CHECK(std::abs(mean_frac - 0.5) < slack);
}

TEST_CASE("a single trial yields zero-one responses") {
    GlmConfig cfg = tiny_glm_config();
    cfg.trials = 1;
    Rng rng(62);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    for (Eigen::Index i = 0; i < sample.counts.size(); ++i)
        CHECK((sample.counts[i] == 0.0 || sample.counts[i] == 1.0));
}

TEST_CASE("large linear predictors saturate the probability") {
    GlmConfig cfg = tiny_glm_config();
    cfg.base.r_ns = 1000.0; // |theta0| ~ 1e3: |eta| is huge for most draws
    Rng rng(63);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    const Eigen::VectorXd eta = sample.X.transpose() * gt.theta0();
    for (Eigen::Index i = 0; i < sample.counts.size(); ++i) {
        if (eta[i] > 40.0) {
            CHECK(sample.p_true[i] == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(sample.counts[i] == double(cfg.trials));
        }
        if (eta[i] < -40.0) {
            CHECK(sample.p_true[i] == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(sample.counts[i] == 0.0);
        }
    }
}

TEST_CASE("half-count responses have the zero fit as optimum") {
    Rng rng(64);
    const int n = 50, d = 6, trials = 10;
    Eigen::MatrixXd design = rng.gaussian_matrix(d, n);
    Eigen::VectorXd counts = Eigen::VectorXd::Constant(n, trials / 2.0);
    FittedModel fm = glm_fit(design, counts, trials);
    CHECK(fm.converged);
    CHECK(fm.grad_inf_norm <= 1e-8);
    CHECK((design.transpose() * fm.theta).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("well-conditioned overdetermined fit recovers the model") {
    ProblemConfig base;
    base.n = 5000;
    base.d = 20;
    base.p = 8;
    base.k = 2;
    base.mu = 1.0;
    base.sigma = 0.0;
    base.r_s = 0.7;
    base.r_ns = 0.7;
    base.rho = 0.5;
    base.priors = Eigen::VectorXd::Constant(2, 0.5);
    GlmConfig cfg;
    cfg.base = base;
    cfg.trials = 1000;
    cfg.n_test = 100;
    Rng rng(65);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    FittedModel fm = glm_fit(sample.X, sample.counts, cfg.trials);
    CHECK(fm.converged);
    const double rel_err = (fm.theta - gt.theta0()).norm() / gt.theta0().norm();
    CHECK(rel_err < 0.05);

    // First-order condition at the returned optimum.
    Eigen::VectorXd p_hat(sample.counts.size());
    const Eigen::VectorXd eta = sample.X.transpose() * fm.theta;
    for (Eigen::Index i = 0; i < eta.size(); ++i) p_hat[i] = 1.0 / (1.0 + std::exp(-eta[i]));
    const Eigen::VectorXd score = sample.X * (sample.counts - double(cfg.trials) * p_hat);
    CHECK(score.lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("log-likelihood never decreases across iterations") {
    GlmConfig cfg = tiny_glm_config();
    cfg.base.n = 60;
    cfg.base.d = 40; // harder than n >> d: near square
    cfg.base.p = 16;
    Rng rng(66);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    std::vector<double> trace;
    FittedModel fm = glm_fit(sample.X, sample.counts, cfg.trials, 100, 1e-8, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
    // The fit is at least as likely as the generating model.
    CHECK(glm_log_likelihood(sample.X, sample.counts, cfg.trials, fm.theta) >=
          glm_log_likelihood(sample.X, sample.counts, cfg.trials, gt.theta0()) - 1e-9);
}

TEST_CASE("hitting the iteration cap flags the model instead of throwing") {
    GlmConfig cfg = tiny_glm_config();
    cfg.base.n = 120;
    Rng rng(69);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    FittedModel fm = glm_fit(sample.X, sample.counts, cfg.trials, 1);
    CHECK_FALSE(fm.converged);
    CHECK(fm.grad_inf_norm > 1e-8);
    CHECK(fm.iterations == 1);
    CHECK(fm.theta.allFinite());
}

TEST_CASE("more features than samples: the Newton steps stay in the design span") {
    GlmConfig cfg = tiny_glm_config();
    cfg.base.n = 15;
    cfg.base.d = 30;
    cfg.base.p = 10;
    cfg.trials = 1000;
    Rng rng(70);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    FittedModel fm = glm_fit(sample.X, sample.counts, cfg.trials);
    CHECK(fm.converged);
    // theta lies in the column space of the (d x n) design: projecting
    // onto it changes nothing.
    Eigen::MatrixXd basis =
        Eigen::HouseholderQR<Eigen::MatrixXd>(sample.X).householderQ() *
        Eigen::MatrixXd::Identity(30, 15);
    const Eigen::VectorXd projected = basis * (basis.transpose() * fm.theta);
    CHECK((fm.theta - projected).norm() < 1e-6 * std::max(1.0, fm.theta.norm()));
}

TEST_CASE("counts out of range are rejected") {
    Eigen::MatrixXd design = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd bad(2);
    bad << 5.0, 11.0;
    CHECK_THROWS_AS(glm_fit(design, bad, 10), ConfigError);
    bad << -1.0, 3.0;
    CHECK_THROWS_AS(glm_fit(design, bad, 10), ConfigError);
}

TEST_CASE("noiseless large-trial fractions concentrate on the probabilities") {
    GlmConfig cfg = tiny_glm_config();
    cfg.base.n = 1000;
    cfg.trials = 10000;
    Rng rng(67);
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample sample = sample_glm(cfg, gt, rng);
    const double bound = 4.0 * std::sqrt(1.0 / (4.0 * cfg.trials));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < sample.counts.size(); ++i)
        worst = std::max(worst, std::abs(sample.counts[i] / cfg.trials - sample.p_true[i]));
    CHECK(worst <= bound);
}

TEST_CASE("the generating model dominates fitted models on average") {
    GlmConfig cfg = tiny_glm_config();
    cfg.trials = 2000;
    cfg.n_test = 4000;
    double oracle_total = 0.0, fitted_total = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        Rng rng(derive_seed(68, 0, rep));
        GroundTruth gt = build_ground_truth(cfg.base, rng);
        GlmSample train = sample_glm(cfg, gt, rng);
        GlmSample test = sample_glm(cfg, gt, rng, cfg.n_test);
        FittedModel fm = glm_fit(train.X, train.counts, cfg.trials);

        const Eigen::VectorXd eta_fit = test.X.transpose() * fm.theta;
        const Eigen::VectorXd eta_true = test.X.transpose() * gt.theta0();
        for (Eigen::Index i = 0; i < test.counts.size(); ++i) {
            const double frac = test.counts[i] / cfg.trials;
            const double p_fit = 1.0 / (1.0 + std::exp(-eta_fit[i]));
            const double p_orc = 1.0 / (1.0 + std::exp(-eta_true[i]));
            fitted_total += (frac - p_fit) * (frac - p_fit);
            oracle_total += (frac - p_orc) * (frac - p_orc);
        }
    }
    CHECK(oracle_total <= fitted_total);
}

TEST_CASE("gain experiment bookkeeping") {
    GlmConfig cfg = tiny_glm_config();
    cfg.base.n = 80;
    cfg.base.d = 24;
    cfg.base.p = 8;
    cfg.n_test = 500;
    cfg.trials = 200;
    const std::vector<double> grid = {0.1, 1.9};
    auto rows = glm_gain_experiment(cfg, grid, 2, 7, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].r_s == doctest::Approx(0.1));
    CHECK(rows[1].r_s == doctest::Approx(1.9));
    for (const auto& row : rows) {
        CHECK(row.replicates == 2);
        CHECK(std::isfinite(row.mean_log_gain));
        CHECK(std::isfinite(row.stderr_log_gain));
        CHECK(std::isfinite(row.mean_log_gain_prob));
    }
    // Determinism of the whole experiment.
    auto again = glm_gain_experiment(cfg, grid, 2, 7, 1);
    CHECK(again[0].mean_log_gain == rows[0].mean_log_gain);
    CHECK(again[1].mean_log_gain_prob == rows[1].mean_log_gain_prob);
}

TEST_SUITE_END();
