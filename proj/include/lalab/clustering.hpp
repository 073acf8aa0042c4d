#pragma once

#include "lalab/rng.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace lalab {

/// Result of estimating the cluster structure from sensitive features.
struct ClusterEstimate {
    Eigen::MatrixXd centers_s; // p x k
    Eigen::VectorXi labels;    // n
    double delta_n = 0.0;      // filled by callers that know the truth
    int iterations = 0;
    double inertia = 0.0;      // sum of squared distances to assigned centers
};

/// Lloyd iterations from k-means++ seeding. Stops at a label fixpoint or
/// after max_iter sweeps; an emptied cluster is re-seeded from the point
/// farthest from its assigned center. Ties in assignment go to the lowest
/// center index, so runs are reproducible.
ClusterEstimate kmeans(const Eigen::MatrixXd& Xs, int k, Rng& rng, int max_iter = 100);

/// Independent restarts with per-restart seed streams; lowest inertia wins,
/// ties broken by lowest restart index.
ClusterEstimate kmeans_best_of(const Eigen::MatrixXd& Xs, int k, std::uint64_t seed,
                               int restarts, int max_iter = 100, int threads = 0);

/// Reconstruction centers_s * one_hot(labels): column i is the center of
/// sample i's cluster (p x n). Invariant under simultaneous permutation of
/// center columns and label values.
Eigen::MatrixXd centers_product(const Eigen::MatrixXd& centers_s, const Eigen::VectorXi& labels);

/// Cluster-estimation error rate: spectral norm of the difference of the
/// two reconstructions, divided by sqrt(n).
double delta_rate(const Eigen::MatrixXd& ms_lambda_true, const Eigen::MatrixXd& ms_lambda_est);

/// Stewart-type bound on the spectral-norm distance of two pseudoinverses:
///   (1 + sqrt(5))/2 * max(sigma_min_a^-2, sigma_min_b^-2) * diff_norm,
/// where the sigma_min are the smallest nonzero singular values of the two
/// matrices and diff_norm the spectral norm of their difference.
double pinv_perturbation_bound(double sigma_min_a, double sigma_min_b, double diff_norm);

/// Parameter regions under which the perturbation analysis applies.
enum class PerturbationCondition { ConditionI, ConditionII, Neither };

/// ConditionI:  psi_d - psi_p < 0.5  and  delta < sqrt(1-(psi_d-psi_p)) - sqrt(psi_d-psi_p)
/// ConditionII: psi_d - psi_p > 2    and  delta < sqrt(psi_d-psi_p-1) - 1
PerturbationCondition perturbation_condition(double psi_d, double psi_p, double delta);

/// Reassigns n_flips distinct samples to a different uniformly-drawn
/// cluster. Gives a dialable cluster-estimation error axis.
Eigen::VectorXi flip_labels(const Eigen::VectorXi& labels, int k, int n_flips, Rng& rng);

} // namespace lalab
