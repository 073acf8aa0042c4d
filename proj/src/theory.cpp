#include "lalab/theory.hpp"

#include "lalab/config_file.hpp"
#include "lalab/errors.hpp"

#include <cassert>
#include <cmath>
#include <string>

namespace lalab {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void check_alignment(const TheoryParams& tp, const Eigen::VectorXd& ut) {
    if (ut.size() != tp.k())
        throw ConfigError("alignment vector must have k entries");
    const double want = std::sqrt(tp.rho) * tp.r_s;
    const double got = ut.norm();
    const double scale = std::max(1.0, tp.r_s);
    if (std::abs(got - want) > 1e-8 * scale)
        throw ConfigError("alignment vector norm " + std::to_string(got) +
                          " does not equal sqrt(rho) * r_s = " + std::to_string(want));
}

void require_off_pole(double ratio, double margin, const char* what) {
    if (classify_regime(ratio, margin) == Regime::Pole)
        throw NumericalError(std::string(what) + ": parameters lie within the pole margin of the " +
                             "interpolation boundary (ratio = " + std::to_string(ratio) + ")");
}

} // namespace

void TheoryParams::validate() const {
    if (!std::isfinite(psi_d) || psi_d <= 0.0) throw ConfigError("psi_d must be > 0");
    if (!std::isfinite(psi_p) || psi_p < 0.0) throw ConfigError("psi_p must be >= 0");
    if (psi_p > psi_d) throw ConfigError("psi_p must be <= psi_d");
    if (!finite_nonneg(sigma)) throw ConfigError("sigma must be finite and >= 0");
    if (!finite_nonneg(r_s)) throw ConfigError("r_s must be finite and >= 0");
    if (!finite_nonneg(r_ns)) throw ConfigError("r_ns must be finite and >= 0");
    if (!finite_nonneg(mu)) throw ConfigError("mu must be finite and >= 0");
    if (!std::isfinite(rho) || rho < 0.0 || rho > 1.0) throw ConfigError("rho must lie in [0, 1]");
    if (priors.size() < 1) throw ConfigError("priors must be non-empty");
    double total = 0.0;
    for (Eigen::Index i = 0; i < priors.size(); ++i) {
        if (!(priors[i] >= 0.0)) throw ConfigError("priors entries must be >= 0");
        total += priors[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("priors must sum to 1 within 1e-12");
    if (!(pole_margin > 0.0) || pole_margin >= 0.5)
        throw ConfigError("pole_margin must lie in (0, 0.5)");
}

bool TheoryParams::balanced() const {
    const double even = 1.0 / static_cast<double>(priors.size());
    for (Eigen::Index i = 0; i < priors.size(); ++i)
        if (std::abs(priors[i] - even) > 1e-12) return false;
    return true;
}

Eigen::VectorXd TheoryParams::default_alignment() const {
    const Eigen::Index kk = k();
    const double per = std::sqrt(rho / static_cast<double>(kk)) * r_s;
    return Eigen::VectorXd::Constant(kk, per);
}

TheoryParams TheoryParams::from(const ProblemConfig& cfg) {
    TheoryParams tp;
    tp.psi_d = static_cast<double>(cfg.d) / cfg.n;
    tp.psi_p = static_cast<double>(cfg.p) / cfg.n;
    tp.sigma = cfg.sigma;
    tp.r_s = cfg.r_s;
    tp.r_ns = cfg.r_ns;
    tp.rho = cfg.rho;
    tp.mu = cfg.mu;
    tp.priors = cfg.priors;
    tp.pole_margin = cfg.pole_margin;
    return tp;
}

TheoryParams TheoryParams::from_config(const ConfigFile& cf) {
    TheoryParams tp;
    if (cf.has("theory.psi_d")) {
        tp.psi_d = cf.get_double("theory.psi_d");
        tp.psi_p = cf.get_double("theory.psi_p");
    } else {
        const double n = static_cast<double>(cf.get_int("n"));
        tp.psi_d = static_cast<double>(cf.get_int("d")) / n;
        tp.psi_p = static_cast<double>(cf.get_int("p")) / n;
    }
    tp.sigma = cf.get_double("sigma");
    tp.r_s = cf.get_double("r_s");
    tp.r_ns = cf.get_double("r_ns");
    tp.rho = cf.get_double("rho");
    tp.mu = cf.get_double("mu");
    tp.pole_margin = cf.get_double_or("pole_margin", kDefaultPoleMargin);
    const int k = static_cast<int>(cf.get_int("k"));
    if (k < 1) throw ConfigError("k must be >= 1");
    if (cf.has("priors")) {
        auto pr = cf.get_double_list("priors");
        if (static_cast<int>(pr.size()) != k) throw ConfigError("priors must have exactly k entries");
        tp.priors = Eigen::Map<const Eigen::VectorXd>(pr.data(), static_cast<Eigen::Index>(pr.size()));
    } else {
        tp.priors = Eigen::VectorXd::Constant(k, 1.0 / k);
    }
    tp.validate();
    return tp;
}

double risk_lookalike_under(const TheoryParams& tp) {
    tp.validate();
    const double g = tp.psi_d - tp.psi_p;
    require_off_pole(g, tp.pole_margin, "risk_lookalike_under");
    if (g > 1.0) throw NumericalError("risk_lookalike_under: psi_d - psi_p exceeds 1");
    return (tp.sigma * tp.sigma + tp.r_s * tp.r_s) / (1.0 - g) - tp.rho * tp.r_s * tp.r_s;
}

TheoryPrediction risk_lookalike_over(const TheoryParams& tp, const Eigen::VectorXd& ut) {
    tp.validate();
    check_alignment(tp, ut);
    const double g = tp.psi_d - tp.psi_p;
    require_off_pole(g, tp.pole_margin, "risk_lookalike_over");
    if (g < 1.0) throw NumericalError("risk_lookalike_over: psi_d - psi_p below 1");

    const double mu2 = tp.mu * tp.mu;
    TheoryPrediction out;
    out.regime = Regime::Over;
    out.alpha.resize(tp.k());
    double pi_quad = 0.0;   // alpha' diag(pi) alpha
    double full_quad = 0.0; // alpha' (I + mu^2 diag(pi)) alpha
    for (Eigen::Index l = 0; l < tp.k(); ++l) {
        out.alpha[l] = ut[l] / (1.0 + mu2 * tp.priors[l] / (g - 1.0));
        pi_quad += tp.priors[l] * out.alpha[l] * out.alpha[l];
        full_quad += (1.0 + mu2 * tp.priors[l]) * out.alpha[l] * out.alpha[l];
    }
    out.gamma0_sq = (tp.sigma * tp.sigma + tp.r_s * tp.r_s + mu2 * pi_quad) / (g - 1.0) +
                    (1.0 - 1.0 / g) * tp.r_ns * tp.r_ns;
    assert(out.gamma0_sq >= 0.0);
    out.risk = tp.sigma * tp.sigma + (1.0 - tp.rho) * tp.r_s * tp.r_s + out.gamma0_sq + full_quad;
    return out;
}

TheoryPrediction risk_minnorm(const TheoryParams& tp, const Eigen::VectorXd& ut) {
    tp.validate();
    require_off_pole(tp.psi_d, tp.pole_margin, "risk_minnorm");

    TheoryPrediction out;
    if (tp.psi_d < 1.0) {
        // All parameters besides sigma and psi_d provably drop out.
        out.regime = Regime::Under;
        out.risk = tp.sigma * tp.sigma / (1.0 - tp.psi_d);
        return out;
    }

    check_alignment(tp, ut);
    const double mu2 = tp.mu * tp.mu;
    out.regime = Regime::Over;
    out.alpha.resize(tp.k());
    double full_quad = 0.0; // alpha~' (I + mu^2 diag(pi)) alpha~
    for (Eigen::Index l = 0; l < tp.k(); ++l) {
        out.alpha[l] = ut[l] / (1.0 + (1.0 + mu2 * tp.priors[l]) / (tp.psi_d - 1.0));
        full_quad += (1.0 + mu2 * tp.priors[l]) * out.alpha[l] * out.alpha[l];
    }
    out.gamma0_sq =
        (tp.sigma * tp.sigma + full_quad) / (tp.psi_d - 1.0) +
        (1.0 - 1.0 / tp.psi_d) * ((1.0 - tp.rho) * tp.r_s * tp.r_s + tp.r_ns * tp.r_ns);
    assert(out.gamma0_sq >= 0.0);
    out.risk = tp.sigma * tp.sigma + out.gamma0_sq + full_quad;
    return out;
}

double lookalike_prediction(const TheoryParams& tp, const Eigen::VectorXd& ut) {
    const Regime r = classify_regime(tp.psi_d - tp.psi_p, tp.pole_margin);
    if (r == Regime::Under) return risk_lookalike_under(tp);
    if (r == Regime::Over) return risk_lookalike_over(tp, ut).risk;
    throw NumericalError("lookalike_prediction: psi_d - psi_p inside the pole margin");
}

double minnorm_prediction(const TheoryParams& tp, const Eigen::VectorXd& ut) {
    return risk_minnorm(tp, ut).risk;
}

double gain_threshold_case2(double psi_d, double psi_p) {
    if (!(psi_d > 1.0)) throw ConfigError("gain_threshold_case2: requires psi_d > 1");
    if (!(psi_p >= 0.0) || psi_p > psi_d)
        throw ConfigError("gain_threshold_case2: requires 0 <= psi_p <= psi_d");
    if (!(psi_d - psi_p < 1.0))
        throw ConfigError("gain_threshold_case2: requires psi_d - psi_p < 1");
    const double inv_gap = 1.0 / (1.0 - psi_d + psi_p);
    const double num = 1.0 + 1.0 / (psi_d - 1.0) - inv_gap;
    const double den = inv_gap + 1.0 / psi_d - 1.0;
    return num / den;
}

double gain_theory(const TheoryParams& tp, const Eigen::VectorXd& ut) {
    tp.validate();
    const Regime r_la = classify_regime(tp.psi_d - tp.psi_p, tp.pole_margin);
    const Regime r_mn = classify_regime(tp.psi_d, tp.pole_margin);
    if (r_la == Regime::Pole || r_mn == Regime::Pole)
        throw NumericalError("gain_theory: an estimator sits inside the pole margin");

    const double risk_la =
        (r_la == Regime::Under) ? risk_lookalike_under(tp) : risk_lookalike_over(tp, ut).risk;
    const double risk_mn = risk_minnorm(tp, ut).risk;
    if (!(risk_la > 0.0)) throw NumericalError("gain_theory: look-alike risk is not positive");
    return risk_mn / risk_la;
}

TheoryPrediction risk_lookalike_over(const TheoryParams& tp) {
    return risk_lookalike_over(tp, tp.default_alignment());
}

TheoryPrediction risk_minnorm(const TheoryParams& tp) {
    return risk_minnorm(tp, tp.default_alignment());
}

double gain_theory(const TheoryParams& tp) { return gain_theory(tp, tp.default_alignment()); }

} // namespace lalab
