#include "lalab/model.hpp"

#include "lalab/config_file.hpp"
#include "lalab/errors.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <sstream>

namespace lalab {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

void ProblemConfig::validate() const {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (d < 1) throw ConfigError("d must be >= 1");
    if (p < 0 || p > d) throw ConfigError("p must satisfy 0 <= p <= d");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (k > n) throw ConfigError("k must be <= n");
    if (!finite_nonneg(mu)) throw ConfigError("mu must be finite and >= 0");
    if (!finite_nonneg(sigma)) throw ConfigError("sigma must be finite and >= 0");
    if (!finite_nonneg(r_s)) throw ConfigError("r_s must be finite and >= 0");
    if (!finite_nonneg(r_ns)) throw ConfigError("r_ns must be finite and >= 0");
    if (!std::isfinite(rho) || rho < 0.0 || rho > 1.0)
        throw ConfigError("rho must lie in [0, 1]");
    if (p == 0) {
        // No sensitive block: the model has no sensitive component and the
        // centers are forced to zero.
        if (mu > 0.0) throw ConfigError("p = 0 requires mu = 0 (no room for centers)");
        if (r_s > 0.0) throw ConfigError("p = 0 requires r_s = 0");
    } else if (k > p) {
        throw ConfigError("k must be <= p: an orthonormal k-column frame must fit in the sensitive block");
    } else if (k == p && r_s > 0.0 && rho < 1.0) {
        throw ConfigError("rho < 1 requires k < p: span(U_s) fills the whole sensitive block");
    }
    if (p == d && r_ns > 0.0)
        throw ConfigError("p = d requires r_ns = 0 (no non-sensitive coordinates)");
    if (priors.size() != k)
        throw ConfigError("priors must have exactly k entries");
    double total = 0.0;
    for (Eigen::Index i = 0; i < priors.size(); ++i) {
        if (!(priors[i] >= 0.0)) throw ConfigError("priors entries must be >= 0");
        total += priors[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError("priors must sum to 1 within 1e-12");
    if (!(pole_margin > 0.0) || pole_margin >= 0.5)
        throw ConfigError("pole_margin must lie in (0, 0.5)");
}

bool ProblemConfig::balanced_priors() const {
    for (Eigen::Index i = 0; i < priors.size(); ++i)
        if (std::abs(priors[i] - 1.0 / k) > 1e-12) return false;
    return true;
}

ProblemConfig ProblemConfig::from_config(const ConfigFile& cf) {
    ProblemConfig cfg;
    cfg.n = static_cast<int>(cf.get_int("n"));
    cfg.d = static_cast<int>(cf.get_int("d"));
    cfg.p = static_cast<int>(cf.get_int("p"));
    cfg.k = static_cast<int>(cf.get_int("k"));
    cfg.mu = cf.get_double("mu");
    cfg.sigma = cf.get_double("sigma");
    cfg.r_s = cf.get_double("r_s");
    cfg.r_ns = cf.get_double("r_ns");
    cfg.rho = cf.get_double("rho");
    cfg.seed = cf.get_u64_or("seed", 0);
    cfg.pole_margin = cf.get_double_or("pole_margin", kDefaultPoleMargin);
    if (cf.has("priors")) {
        auto pr = cf.get_double_list("priors");
        cfg.priors = Eigen::Map<const Eigen::VectorXd>(pr.data(), static_cast<Eigen::Index>(pr.size()));
    } else if (cfg.k >= 1) {
        cfg.priors = Eigen::VectorXd::Constant(cfg.k, 1.0 / cfg.k);
    }
    cfg.validate();
    return cfg;
}

Eigen::VectorXd GroundTruth::theta0() const {
    Eigen::VectorXd out(d());
    out.head(theta0_s.size()) = theta0_s;
    out.tail(theta0_ns.size()) = theta0_ns;
    return out;
}

GroundTruth GroundTruth::with_centers(Eigen::MatrixXd M, Eigen::MatrixXd U_s,
                                      Eigen::VectorXd theta0_s, Eigen::VectorXd theta0_ns) {
    if (M.rows() != theta0_s.size() + theta0_ns.size())
        throw ConfigError("with_centers: M row count must equal d");
    if (U_s.rows() != theta0_s.size() || U_s.cols() != M.cols())
        throw ConfigError("with_centers: U_s must be p x k");
    GroundTruth gt;
    gt.M = std::move(M);
    gt.U_s = std::move(U_s);
    gt.theta0_s = std::move(theta0_s);
    gt.theta0_ns = std::move(theta0_ns);
    return gt;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Under: return "under";
        case Regime::Over: return "over";
        case Regime::Pole: return "pole";
    }
    return "?";
}

Regime classify_regime(double ratio, double pole_margin) {
    if (ratio < 1.0 - pole_margin) return Regime::Under;
    if (ratio > 1.0 + pole_margin) return Regime::Over;
    return Regime::Pole;
}

AsymptoticRegime derive_regime(const ProblemConfig& cfg) {
    AsymptoticRegime ar;
    ar.psi_d = static_cast<double>(cfg.d) / cfg.n;
    ar.psi_p = static_cast<double>(cfg.p) / cfg.n;
    ar.regime_lookalike = classify_regime(ar.psi_d - ar.psi_p, cfg.pole_margin);
    ar.regime_minnorm = classify_regime(ar.psi_d, cfg.pole_margin);
    return ar;
}

namespace {

// Haar-distributed p x k orthonormal frame: thin QR of a Gaussian matrix,
// columns sign-fixed so the R diagonal is positive.
Eigen::MatrixXd random_orthonormal_frame(Eigen::Index p, Eigen::Index k, Rng& rng) {
    Eigen::MatrixXd G = rng.gaussian_matrix(p, k);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(p, k);
    Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < k; ++j)
        if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
    return Q;
}

} // namespace

GroundTruth build_ground_truth(const ProblemConfig& cfg, Rng& rng) {
    cfg.validate();
    const Eigen::Index p = cfg.p, d = cfg.d, k = cfg.k;

    GroundTruth gt;
    gt.M = Eigen::MatrixXd::Zero(d, k);

    if (p == 0) {
        gt.U_s = Eigen::MatrixXd::Zero(0, k);
        gt.theta0_s = Eigen::VectorXd(0);
    } else {
        gt.U_s = random_orthonormal_frame(p, k, rng);
        gt.M.topRows(p) = cfg.mu * gt.U_s;

        // Split the sensitive component: rho of its squared norm inside
        // span(U_s), the rest in the orthogonal complement. A zero
        // projection of the Gaussian draw is a probability-zero event;
        // resample once, then give up.
        const double in_coeff = cfg.r_s * std::sqrt(cfg.rho);
        const double out_coeff = cfg.r_s * std::sqrt(1.0 - cfg.rho);
        gt.theta0_s = Eigen::VectorXd::Zero(p);
        if (in_coeff > 0.0) {
            Eigen::VectorXd proj;
            double norm = 0.0;
            for (int attempt = 0; attempt < 2 && norm <= 0.0; ++attempt) {
                Eigen::VectorXd z1 = rng.gaussian_vector(p);
                proj = gt.U_s * (gt.U_s.transpose() * z1);
                norm = proj.norm();
            }
            if (norm <= 0.0)
                throw NumericalError("build_ground_truth: projection of z1 onto span(U_s) vanished twice");
            gt.theta0_s += (in_coeff / norm) * proj;
        }
        if (out_coeff > 0.0) {
            Eigen::VectorXd comp;
            double norm = 0.0;
            for (int attempt = 0; attempt < 2 && norm <= 0.0; ++attempt) {
                Eigen::VectorXd z2 = rng.gaussian_vector(p);
                comp = z2 - gt.U_s * (gt.U_s.transpose() * z2);
                norm = comp.norm();
            }
            if (norm <= 0.0)
                throw NumericalError("build_ground_truth: complement projection of z2 vanished twice");
            gt.theta0_s += (out_coeff / norm) * comp;
        }
    }

    const Eigen::Index dns = d - p;
    if (dns == 0) {
        gt.theta0_ns = Eigen::VectorXd(0);
    } else if (cfg.r_ns == 0.0) {
        gt.theta0_ns = Eigen::VectorXd::Zero(dns);
    } else {
        Eigen::VectorXd z;
        double norm = 0.0;
        for (int attempt = 0; attempt < 2 && norm <= 0.0; ++attempt) {
            z = rng.gaussian_vector(dns);
            norm = z.norm();
        }
        if (norm <= 0.0)
            throw NumericalError("build_ground_truth: non-sensitive direction vanished twice");
        gt.theta0_ns = (cfg.r_ns / norm) * z;
    }

    return gt;
}

} // namespace lalab
