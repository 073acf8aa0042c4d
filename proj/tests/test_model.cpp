#include "lalab/model.hpp"

#include "lalab/config_file.hpp"
#include "lalab/errors.hpp"
#include "lalab/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace lalab;

namespace {

ProblemConfig base_config() {
    ProblemConfig cfg;
    cfg.n = 400;
    cfg.d = 120;
    cfg.p = 50;
    cfg.k = 3;
    cfg.mu = 2.0;
    cfg.sigma = 1.0;
    cfg.r_s = 1.5;
    cfg.r_ns = 2.0;
    cfg.rho = 0.3;
    cfg.priors = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    cfg.seed = 11;
    return cfg;
}

} // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("config validation rejects bad parameters") {
    ProblemConfig cfg = base_config();
    CHECK_NOTHROW(cfg.validate());

    ProblemConfig bad = cfg;
    bad.k = 60; // > p
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.priors[0] += 1e-6;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.priors = Eigen::VectorXd::Constant(2, 0.5);
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.rho = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.sigma = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.p = 0; // r_s and mu nonzero
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    // rho < 1 needs room outside span(U_s)
    bad = cfg;
    bad.p = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = cfg;
    bad.n = 2; // k > n
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("ground truth satisfies the advertised norms") {
    ProblemConfig cfg = base_config();
    Rng rng(cfg.seed);
    GroundTruth gt = build_ground_truth(cfg, rng);

    CHECK(gt.theta0_s.norm() == doctest::Approx(cfg.r_s).epsilon(1e-10));
    CHECK(gt.theta0_ns.norm() == doctest::Approx(cfg.r_ns).epsilon(1e-10));
    CHECK(gt.alignment().norm() ==
          doctest::Approx(std::sqrt(cfg.rho) * cfg.r_s).epsilon(1e-10));

    // |theta0|^2 = r_s^2 + r_ns^2
    CHECK(gt.theta0().squaredNorm() ==
          doctest::Approx(cfg.r_s * cfg.r_s + cfg.r_ns * cfg.r_ns).epsilon(1e-10));

    // U_s^T U_s = I entrywise
    const Eigen::MatrixXd gram = gt.U_s.transpose() * gt.U_s;
    CHECK((gram - Eigen::MatrixXd::Identity(cfg.k, cfg.k)).cwiseAbs().maxCoeff() < 1e-10);

    // M = [mu U_s; 0] and M^T M = mu^2 I
    CHECK(gt.M.bottomRows(cfg.d - cfg.p).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd mgram = gt.M.transpose() * gt.M;
    CHECK((mgram - cfg.mu * cfg.mu * Eigen::MatrixXd::Identity(cfg.k, cfg.k))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("full alignment forces theta0_s into span(U_s)") {
    ProblemConfig cfg = base_config();
    cfg.rho = 1.0;
    Rng rng(3);
    GroundTruth gt = build_ground_truth(cfg, rng);
    const Eigen::VectorXd residual =
        gt.theta0_s - gt.U_s * (gt.U_s.transpose() * gt.theta0_s);
    CHECK(residual.norm() < 1e-10);
}

TEST_CASE("zero alignment keeps theta0_s orthogonal to span(U_s)") {
    ProblemConfig cfg = base_config();
    cfg.rho = 0.0;
    Rng rng(4);
    GroundTruth gt = build_ground_truth(cfg, rng);
    CHECK(gt.alignment().norm() < 1e-10);
    CHECK(gt.theta0_s.norm() == doctest::Approx(cfg.r_s).epsilon(1e-10));
}

TEST_CASE("projection norm recomputed from outputs matches sqrt(rho) r_s") {
    ProblemConfig cfg = base_config();
    cfg.d = 260;
    cfg.p = 200;
    cfg.k = 3;
    cfg.r_s = 1.0;
    cfg.rho = 0.3;
    Rng rng(5);
    GroundTruth gt = build_ground_truth(cfg, rng);
    const double projected = (gt.U_s.transpose() * gt.theta0_s).norm();
    CHECK(projected == doctest::Approx(0.5477225575051661).epsilon(1e-10));
}

TEST_CASE("same seed gives bitwise-identical ground truth") {
    ProblemConfig cfg = base_config();
    Rng a(99), b(99);
    GroundTruth ga = build_ground_truth(cfg, a);
    GroundTruth gb = build_ground_truth(cfg, b);
    CHECK(ga.theta0_s == gb.theta0_s);
    CHECK(ga.theta0_ns == gb.theta0_ns);
    CHECK(ga.U_s == gb.U_s);
    CHECK(ga.M == gb.M);
}

TEST_CASE("degenerate blocks: p = 0 and p = d") {
    ProblemConfig cfg = base_config();
    cfg.p = 0;
    cfg.mu = 0.0;
    cfg.r_s = 0.0;
    Rng rng(6);
    GroundTruth gt = build_ground_truth(cfg, rng);
    CHECK(gt.theta0_s.size() == 0);
    CHECK(gt.M.cwiseAbs().maxCoeff() == 0.0);
    CHECK(gt.theta0_ns.norm() == doctest::Approx(cfg.r_ns).epsilon(1e-10));

    ProblemConfig all_sensitive = base_config();
    all_sensitive.p = all_sensitive.d;
    all_sensitive.r_ns = 0.0;
    Rng rng2(7);
    GroundTruth gt2 = build_ground_truth(all_sensitive, rng2);
    CHECK(gt2.theta0_ns.size() == 0);
    CHECK(gt2.theta0().norm() == doctest::Approx(all_sensitive.r_s).epsilon(1e-10));
}

TEST_CASE("expert constructor accepts an arbitrary center matrix") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Random(10, 2);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(4, 2);
    U(0, 0) = 1.0;
    U(1, 1) = 1.0;
    GroundTruth gt = GroundTruth::with_centers(M, U, Eigen::VectorXd::Zero(4),
                                               Eigen::VectorXd::Zero(6));
    CHECK(gt.M == M);
    CHECK(gt.d() == 10);
    CHECK_THROWS_AS(GroundTruth::with_centers(M, U, Eigen::VectorXd::Zero(3),
                                              Eigen::VectorXd::Zero(6)),
                    ConfigError);
}

TEST_CASE("regime classification honors the pole margin") {
    CHECK(classify_regime(0.97, 0.02) == Regime::Under);
    CHECK(classify_regime(0.985, 0.02) == Regime::Pole);
    CHECK(classify_regime(1.0, 0.02) == Regime::Pole);
    CHECK(classify_regime(1.015, 0.02) == Regime::Pole);
    CHECK(classify_regime(1.03, 0.02) == Regime::Over);

    ProblemConfig cfg = base_config();
    cfg.n = 100;
    cfg.d = 120;
    cfg.p = 50; // psi_d = 1.2, psi_d - psi_p = 0.7
    AsymptoticRegime ar = derive_regime(cfg);
    CHECK(ar.psi_d == doctest::Approx(1.2));
    CHECK(ar.psi_p == doctest::Approx(0.5));
    CHECK(ar.regime_minnorm == Regime::Over);
    CHECK(ar.regime_lookalike == Regime::Under);
}

TEST_CASE("config file round trip with balanced default priors") {
    const char* text =
        "n = 400\nd = 120\np = 50\nk = 3\nmu = 2\nsigma = 1\n"
        "r_s = 1.5\nr_ns = 2\nrho = 0.3\nseed = 11\n";
    ConfigFile cf = ConfigFile::parse_string(text);
    ProblemConfig cfg = ProblemConfig::from_config(cf);
    CHECK(cfg.n == 400);
    CHECK(cfg.balanced_priors());
    CHECK_NOTHROW(cf.ensure_all_used());

    ConfigFile with_priors = ConfigFile::parse_string(
        std::string(text) + "priors = [0.2, 0.3, 0.5]\n");
    ProblemConfig cfg2 = ProblemConfig::from_config(with_priors);
    CHECK_FALSE(cfg2.balanced_priors());
    CHECK(cfg2.priors[2] == doctest::Approx(0.5));

    ConfigFile typo = ConfigFile::parse_string(std::string(text) + "sigm = 1\n");
    ProblemConfig::from_config(typo);
    CHECK_THROWS_AS(typo.ensure_all_used(), ConfigError);
}

TEST_SUITE_END();
