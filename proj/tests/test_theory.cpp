#include "lalab/theory.hpp"

#include "lalab/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace lalab;

namespace {

TheoryParams balanced_params(double psi_d, double psi_p, double sigma, double r_s, double r_ns,
                             double rho, double mu, int k) {
    TheoryParams tp;
    tp.psi_d = psi_d;
    tp.psi_p = psi_p;
    tp.sigma = sigma;
    tp.r_s = r_s;
    tp.r_ns = r_ns;
    tp.rho = rho;
    tp.mu = mu;
    tp.priors = Eigen::VectorXd::Constant(k, 1.0 / k);
    return tp;
}

// Residual of the defining relations of the overparametrized look-alike
// prediction: substitute the returned alpha back and recompute gamma0^2.
double lookalike_over_residual(const TheoryParams& tp, const TheoryPrediction& pred) {
    const double g = tp.psi_d - tp.psi_p;
    const double mu2 = tp.mu * tp.mu;
    double pi_quad = 0.0;
    for (Eigen::Index l = 0; l < pred.alpha.size(); ++l)
        pi_quad += tp.priors[l] * pred.alpha[l] * pred.alpha[l];
    const double gamma_again = (tp.sigma * tp.sigma + tp.r_s * tp.r_s + mu2 * pi_quad) / (g - 1.0) +
                               (1.0 - 1.0 / g) * tp.r_ns * tp.r_ns;
    return std::abs(gamma_again - pred.gamma0_sq);
}

} // namespace

TEST_SUITE_BEGIN("theory");

TEST_CASE("underparametrized look-alike risk: hand values") {
    // gap 0, full alignment, zero noise: 1/1 - 1 = 0
    CHECK(risk_lookalike_under(balanced_params(0.5, 0.5, 0.0, 1.0, 0.0, 1.0, 0.0, 2)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // no signal: 1 / (1 - 0.5) = 2
    CHECK(risk_lookalike_under(balanced_params(0.7, 0.2, 1.0, 0.0, 0.0, 0.0, 0.0, 2)) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // (1 + 1) / 0.5 - 0.3 = 3.7
    CHECK(risk_lookalike_under(balanced_params(0.7, 0.2, 1.0, 1.0, 5.0, 0.3, 2.0, 3)) ==
          doctest::Approx(3.7).epsilon(1e-12));
}

TEST_CASE("underparametrized look-alike risk ignores priors, mu and r_ns") {
    TheoryParams a = balanced_params(0.8, 0.3, 1.0, 1.0, 2.0, 0.3, 5.0, 3);
    TheoryParams b = a;
    b.mu = 0.0;
    b.r_ns = 100.0;
    b.priors = Eigen::VectorXd(3);
    b.priors << 0.7, 0.2, 0.1;
    CHECK(risk_lookalike_under(a) == risk_lookalike_under(b));
    // No cluster structure on the sensitive block is the rho = 0 case.
    TheoryParams c = a;
    c.rho = 0.0;
    const double want = (1.0 + 1.0) / 0.5;
    CHECK(risk_lookalike_under(c) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("overparametrized look-alike risk: two-cluster hand value") {
    // k=2, even priors, mu = sqrt(2), gap = 2, alignment (1, 0),
    // r_s = sqrt(2), rho = 0.5, sigma = 1, r_ns = 0.
    TheoryParams tp = balanced_params(3.0, 1.0, 1.0, std::sqrt(2.0), 0.0, 0.5, std::sqrt(2.0), 2);
    Eigen::VectorXd ut(2);
    ut << 1.0, 0.0;
    TheoryPrediction pred = risk_lookalike_over(tp, ut);
    CHECK(pred.alpha(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pred.alpha(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pred.gamma0_sq == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(pred.risk == doctest::Approx(5.75).epsilon(1e-12));
    CHECK(pred.regime == Regime::Over);
    CHECK(lookalike_over_residual(tp, pred) < 1e-12);
}

TEST_CASE("overparametrized look-alike risk at mu = 0 reduces to the misspecified form") {
    TheoryParams tp = balanced_params(3.4, 0.9, 0.8, 1.3, 2.1, 0.45, 0.0, 4);
    const double g = tp.psi_d - tp.psi_p;
    TheoryPrediction pred = risk_lookalike_over(tp);
    const double want = (1.0 + 1.0 / (g - 1.0)) * (tp.sigma * tp.sigma + tp.r_s * tp.r_s) +
                        (1.0 - 1.0 / g) * tp.r_ns * tp.r_ns;
    CHECK(pred.risk == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("overparametrized look-alike risk: wide-gap limit") {
    TheoryParams tp = balanced_params(1e6 + 1.0, 1.0, 1.0, 1.2, 0.9, 0.6, 2.0, 3);
    Eigen::VectorXd ut = tp.default_alignment();
    TheoryPrediction pred = risk_lookalike_over(tp, ut);
    // alpha -> ut, gamma0^2 -> r_ns^2.
    CHECK((pred.alpha - ut).norm() < 1e-4);
    CHECK(pred.gamma0_sq == doctest::Approx(tp.r_ns * tp.r_ns).epsilon(1e-4));
    double quad = 0.0;
    for (Eigen::Index l = 0; l < 3; ++l)
        quad += (1.0 + tp.mu * tp.mu * tp.priors[l]) * ut[l] * ut[l];
    const double limit = tp.sigma * tp.sigma + (1.0 - tp.rho) * tp.r_s * tp.r_s +
                         tp.r_ns * tp.r_ns + quad;
    CHECK(pred.risk == doctest::Approx(limit).epsilon(1e-4));
}

TEST_CASE("min-norm risk, underparametrized branch") {
    CHECK(risk_minnorm(balanced_params(0.5, 0.2, 1.0, 1.0, 2.0, 0.3, 5.0, 3)).risk ==
          doctest::Approx(2.0).epsilon(1e-12));
    // Only sigma and psi_d matter.
    for (double mu : {0.0, 3.0})
        for (double rho : {0.0, 0.9})
            for (double r_ns : {0.0, 7.0}) {
                TheoryParams tp = balanced_params(0.5, 0.4, 1.0, 2.0, r_ns, rho, mu, 5);
                CHECK(risk_minnorm(tp).risk == doctest::Approx(2.0).epsilon(1e-12));
            }
}

TEST_CASE("min-norm risk, overparametrized branch at mu = 0 matches the isotropic formula") {
    TheoryParams tp = balanced_params(2.0, 0.8, 1.1, 1.4, 2.2, 0.35, 0.0, 3);
    TheoryPrediction pred = risk_minnorm(tp);
    // With mu = 0 the shrunk alignment folds into (1 - 1/psi_d) rho r_s^2,
    // giving sigma^2 psi_d/(psi_d-1) + (1 - 1/psi_d)(r_s^2 + r_ns^2).
    const double want =
        tp.sigma * tp.sigma * tp.psi_d / (tp.psi_d - 1.0) +
        (1.0 - 1.0 / tp.psi_d) * (tp.r_s * tp.r_s + tp.r_ns * tp.r_ns);
    CHECK(pred.risk == doctest::Approx(want).epsilon(1e-12));

    // Self-consistency of the defining relations.
    const double mu2 = 0.0;
    double full_quad = 0.0;
    Eigen::VectorXd ut = tp.default_alignment();
    for (Eigen::Index l = 0; l < 3; ++l) {
        const double expected_alpha = ut[l] / (1.0 + (1.0 + mu2) / (tp.psi_d - 1.0));
        CHECK(pred.alpha[l] == doctest::Approx(expected_alpha).epsilon(1e-12));
        full_quad += (1.0 + mu2) * pred.alpha[l] * pred.alpha[l];
    }
    const double gamma_again =
        (tp.sigma * tp.sigma + full_quad) / (tp.psi_d - 1.0) +
        (1.0 - 1.0 / tp.psi_d) * ((1.0 - tp.rho) * tp.r_s * tp.r_s + tp.r_ns * tp.r_ns);
    CHECK(pred.gamma0_sq == doctest::Approx(gamma_again).epsilon(1e-12));
}

TEST_CASE("pole margins raise numerical errors") {
    TheoryParams tp = balanced_params(1.01, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 2);
    CHECK_THROWS_AS(risk_minnorm(tp), NumericalError);
    TheoryParams tp2 = balanced_params(1.6, 0.61, 1.0, 1.0, 0.0, 0.3, 0.0, 2); // gap 0.99
    CHECK_THROWS_AS(risk_lookalike_under(tp2), NumericalError);
    CHECK_THROWS_AS(risk_lookalike_over(tp2, tp2.default_alignment()), NumericalError);
    CHECK_THROWS_AS(gain_theory(tp2), NumericalError);
    // Wrong-branch calls are rejected even off the pole.
    TheoryParams over = balanced_params(3.0, 0.5, 1.0, 1.0, 0.0, 0.3, 0.0, 2);
    CHECK_THROWS_AS(risk_lookalike_under(over), NumericalError);
    TheoryParams under = balanced_params(0.9, 0.5, 1.0, 1.0, 0.0, 0.3, 0.0, 2);
    CHECK_THROWS_AS(risk_lookalike_over(under, under.default_alignment()), NumericalError);
}

TEST_CASE("alignment vector must carry sqrt(rho) r_s of norm") {
    TheoryParams tp = balanced_params(3.0, 0.5, 1.0, 1.0, 0.0, 0.3, 1.0, 2);
    Eigen::VectorXd wrong = Eigen::VectorXd::Constant(2, 1.0);
    CHECK_THROWS_AS(risk_lookalike_over(tp, wrong), ConfigError);
    Eigen::VectorXd short_vec = Eigen::VectorXd::Constant(1, std::sqrt(0.3));
    CHECK_THROWS_AS(risk_lookalike_over(tp, short_vec), ConfigError);
}

TEST_CASE("gain threshold in the mixed regime") {
    // psi_d = 2, psi_p = 1.7: (1 + 1 - 10/7) / (10/7 + 1/2 - 1) = 8/13.
    const double t = gain_threshold_case2(2.0, 1.7);
    CHECK(t == doctest::Approx(8.0 / 13.0).epsilon(1e-12));
    CHECK(0.5 * 0.5 <= t); // SNR = 0.5 satisfies the condition

    // Threshold grows with psi_p at fixed psi_d.
    double prev = gain_threshold_case2(2.0, 1.05);
    for (double psi_p : {1.2, 1.4, 1.6, 1.8, 1.95}) {
        const double cur = gain_threshold_case2(2.0, psi_p);
        CHECK(cur > prev);
        prev = cur;
    }

    CHECK_THROWS_AS(gain_threshold_case2(2.0, 2.5), ConfigError);  // psi_p > psi_d
    CHECK_THROWS_AS(gain_threshold_case2(0.9, 0.5), ConfigError);  // psi_d <= 1
    CHECK_THROWS_AS(gain_threshold_case2(3.0, 1.5), ConfigError);  // gap >= 1
}

TEST_CASE("gain in the fully underparametrized case matches the explicit ratio") {
    TheoryParams tp = balanced_params(0.9, 0.5, 1.0, 0.8, 3.0, 0.3, 5.0, 4);
    const double snr2 = tp.r_s * tp.r_s / (tp.sigma * tp.sigma);
    const double explicit_ratio =
        (1.0 / (1.0 - tp.psi_d)) /
        ((1.0 + snr2) / (1.0 - tp.psi_d + tp.psi_p) - tp.rho * snr2);
    CHECK(gain_theory(tp) == doctest::Approx(explicit_ratio).epsilon(1e-12));
}

TEST_CASE("vanishing-signal limit of the underparametrized gain") {
    TheoryParams tp = balanced_params(0.9, 0.5, 1.0, 1e-6, 2.0, 0.3, 5.0, 3);
    const double limit = (1.0 - tp.psi_d + tp.psi_p) / (1.0 - tp.psi_d);
    CHECK(std::abs(gain_theory(tp) - limit) < 1e-4);
    CHECK(limit == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("large r_ns limit of the fully overparametrized gain") {
    TheoryParams tp = balanced_params(4.0, 1.0, 0.1, 0.5, 1000.0, 0.3, 5.0, 5);
    const double limit = (1.0 - 1.0 / tp.psi_d) / (1.0 - 1.0 / (tp.psi_d - tp.psi_p));
    CHECK(std::abs(gain_theory(tp) - limit) < 1e-3);
    CHECK(limit == doctest::Approx(1.125).epsilon(1e-12));
}

TEST_CASE("mixed-regime gain is monotone and beats one under the threshold") {
    const double psi_d = 2.0, psi_p = 1.7;
    const double threshold = gain_threshold_case2(psi_d, psi_p);

    // Nondecreasing in r_ns and rho, nonincreasing in mu^2/k, on coarse grids.
    const int k = 4;
    for (double snr : {0.3, 0.7}) {
        double prev = -1.0;
        for (int i = 0; i < 8; ++i) {
            TheoryParams tp = balanced_params(psi_d, psi_p, 1.0, snr, 0.5 * i, 0.4, 2.0, k);
            const double g = gain_theory(tp);
            CHECK(g >= prev - 1e-12);
            prev = g;
        }
        prev = -1.0;
        for (int i = 0; i < 8; ++i) {
            TheoryParams tp = balanced_params(psi_d, psi_p, 1.0, snr, 1.0, i / 7.0, 2.0, k);
            const double g = gain_theory(tp);
            CHECK(g >= prev - 1e-12);
            prev = g;
        }
        prev = 1e300;
        for (int i = 0; i < 8; ++i) {
            const double mu = std::sqrt(3.0 * i); // mu^2/k grid 0..21/k
            TheoryParams tp = balanced_params(psi_d, psi_p, 1.0, snr, 1.0, 0.4, mu, k);
            const double g = gain_theory(tp);
            CHECK(g <= prev + 1e-12);
            prev = g;
        }
    }

    // Below the threshold the gain never drops under 1.
    for (double snr : {0.1, 0.4, std::sqrt(threshold) * 0.99})
        for (double mu : {0.0, 1.0, 10.0})
            for (double rho : {0.0, 0.5, 1.0})
                for (double r_ns : {0.0, 2.0}) {
                    TheoryParams tp = balanced_params(psi_d, psi_p, 1.0, snr, r_ns, rho, mu, k);
                    CHECK(gain_theory(tp) >= 1.0 - 1e-12);
                }
}

TEST_CASE("parameter validation") {
    TheoryParams tp = balanced_params(0.5, 0.2, 1.0, 1.0, 1.0, 0.3, 1.0, 2);
    CHECK_NOTHROW(tp.validate());
    TheoryParams bad = tp;
    bad.psi_p = 0.7; // > psi_d
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tp;
    bad.rho = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tp;
    bad.priors = Eigen::VectorXd(0);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(tp.balanced());
    TheoryParams skew = tp;
    skew.priors << 0.6, 0.4;
    CHECK_FALSE(skew.balanced());
    CHECK(tp.default_alignment().norm() ==
          doctest::Approx(std::sqrt(tp.rho) * tp.r_s).epsilon(1e-12));
}

TEST_SUITE_END();
