#pragma once

#include "lalab/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace lalab {

class ConfigFile;

/// Classification thresholds ψ−1 = ±pole_margin around the interpolation
/// boundary. The asymptotic formulas diverge at the boundary itself, so
/// predictions inside the margin are refused rather than extrapolated.
inline constexpr double kDefaultPoleMargin = 0.02;

/// All scalar problem parameters plus the master seed.
///
/// n samples, d features of which the first p are sensitive, k clusters
/// with prior probabilities `priors`, center energy mu, response noise
/// sigma. r_s / r_ns are the norms of the sensitive / non-sensitive model
/// components and rho in [0,1] the fraction of sensitive model energy
/// aligned with the span of the cluster centers.
struct ProblemConfig {
    int n = 0;
    int d = 0;
    int p = 0;
    int k = 0;
    double mu = 0.0;
    double sigma = 0.0;
    double r_s = 0.0;
    double r_ns = 0.0;
    double rho = 0.0;
    Eigen::VectorXd priors; // length k; empty means balanced
    std::uint64_t seed = 0;
    double pole_margin = kDefaultPoleMargin;

    /// Throws ConfigError on any violated constraint.
    void validate() const;

    bool balanced_priors() const;

    /// Reads top-level keys (n, d, p, k, mu, sigma, r_s, r_ns, rho,
    /// priors, seed, pole_margin). Missing priors default to balanced.
    static ProblemConfig from_config(const ConfigFile& cf);
};

/// The generating model: theta0 split into sensitive/non-sensitive parts,
/// the orthonormal frame U_s spanning the sensitive cluster centers, and
/// the full center matrix M (d x k).
struct GroundTruth {
    Eigen::VectorXd theta0_s;  // length p
    Eigen::VectorXd theta0_ns; // length d-p
    Eigen::MatrixXd U_s;       // p x k, orthonormal columns
    Eigen::MatrixXd M;         // d x k

    Eigen::Index p() const { return theta0_s.size(); }
    Eigen::Index d() const { return theta0_s.size() + theta0_ns.size(); }
    Eigen::Index k() const { return M.cols(); }

    Eigen::VectorXd theta0() const;

    /// Sensitive rows of the center matrix (p x k).
    Eigen::MatrixXd sensitive_centers() const { return M.topRows(theta0_s.size()); }

    /// Projection of the sensitive model component onto the center frame,
    /// U_s^T theta0_s (length k).
    Eigen::VectorXd alignment() const { return U_s.transpose() * theta0_s; }

    /// Expert path: accepts an arbitrary center matrix verbatim. The
    /// caller owns the relationship between theta0 and the centers; only
    /// shape consistency is checked.
    static GroundTruth with_centers(Eigen::MatrixXd M, Eigen::MatrixXd U_s,
                                    Eigen::VectorXd theta0_s, Eigen::VectorXd theta0_ns);
};

enum class Regime { Under, Over, Pole };

const char* regime_name(Regime r);

/// Classifies an effective-dimension ratio against the interpolation
/// boundary at 1: Under below 1-margin, Over above 1+margin, Pole inside.
Regime classify_regime(double ratio, double pole_margin = kDefaultPoleMargin);

struct AsymptoticRegime {
    double psi_d = 0.0; // d/n
    double psi_p = 0.0; // p/n
    Regime regime_lookalike = Regime::Under; // classified on psi_d - psi_p
    Regime regime_minnorm = Regime::Under;   // classified on psi_d
};

AsymptoticRegime derive_regime(const ProblemConfig& cfg);

/// Draws the ground-truth model.
///
/// U_s is a Haar-random p x k orthonormal frame (QR of a Gaussian matrix
/// with sign-fixed R diagonal). Centers are M = [mu * U_s; 0]. theta0_s
/// splits its energy rho : (1-rho) between span(U_s) and its complement
/// using two independent Gaussian directions; theta0_ns is a random
/// direction scaled to r_ns.
GroundTruth build_ground_truth(const ProblemConfig& cfg, Rng& rng);

} // namespace lalab
