#pragma once

#include "lalab/model.hpp"
#include "lalab/rng.hpp"

#include <Eigen/Core>

#include <iosfwd>

namespace lalab {

/// A sampled training set: X = M Lambda + Z column-per-sample, responses
/// y = X^T theta0 + eps, integer cluster labels in [0, k).
struct Dataset {
    Eigen::MatrixXd X;      // d x n
    Eigen::VectorXd y;      // n
    Eigen::VectorXi labels; // n
    int k = 0;
    int p = 0;

    Eigen::Index n() const { return X.cols(); }
    Eigen::Index d() const { return X.rows(); }

    /// One-hot membership matrix Lambda (k x n), derived from labels.
    Eigen::MatrixXd lambda() const;
};

/// Dataset after the sensitive block of every sample has been replaced by
/// its cluster's center column. Responses and labels are untouched.
struct AnonymizedDataset {
    Eigen::MatrixXd X_L;    // d x n
    Eigen::VectorXd y;      // n
    Eigen::VectorXi labels; // n
    int k = 0;
    int p = 0;
};

Dataset sample_dataset(const ProblemConfig& cfg, const GroundTruth& gt, Rng& rng);

/// Replaces rows 0..p-1 of column i with centers_s.col(labels[i]); rows
/// p..d-1 are copied verbatim. p is centers_s.rows() and must match ds.p.
AnonymizedDataset anonymize(const Dataset& ds, const Eigen::MatrixXd& centers_s);

/// Per-cluster means of the sensitive rows (p x k). Throws NumericalError
/// naming the first empty cluster.
Eigen::MatrixXd empirical_centers(const Dataset& ds);

/// One row per sample: label, y, x_1..x_d.
void write_dataset_csv(const Dataset& ds, std::ostream& out);

} // namespace lalab
