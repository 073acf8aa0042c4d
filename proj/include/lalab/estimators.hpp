#pragma once

#include "lalab/data.hpp"
#include "lalab/model.hpp"

#include <Eigen/Core>

#include <iosfwd>

namespace lalab {

enum class FitKind { MinNorm, LookAlike, LookAlikeEstimated };

const char* fit_kind_name(FitKind k);

/// A fitted coefficient vector plus solve diagnostics.
///
/// The GLM fitter reuses this type; `converged`, `iterations` and
/// `grad_inf_norm` are meaningful only there.
struct FittedModel {
    Eigen::VectorXd theta;
    int rank_used = 0;
    double sigma_min_kept = 0.0;
    FitKind kind = FitKind::MinNorm;

    bool converged = true;
    int iterations = 0;
    double grad_inf_norm = 0.0;
};

/// Minimum-norm least squares: theta = V S^+ U^T y from the thin SVD of
/// design^T (n x d). Singular values at or below rcond * s_max are
/// truncated, rcond = machine epsilon * max(n, d). Among all minimizers
/// of |y - design^T theta| the returned theta has minimal norm.
FittedModel min_norm_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

/// min_norm_fit on the anonymized design built from centers_s.
FittedModel fit_look_alike(const Dataset& ds, const Eigen::MatrixXd& centers_s,
                           FitKind kind = FitKind::LookAlike);

enum class CentersMode { TrueCenters, EmpiricalCenters };

/// Anonymizes with the model's true sensitive centers or the within-cluster
/// empirical means, then fits.
FittedModel fit_look_alike(const Dataset& ds, const GroundTruth& gt, CentersMode mode);

/// Ridge regression for the loss (1/2n)|y - design^T theta|^2 + lambda
/// |theta|^2, solved by SVD shrinkage s / (s^2 + 2 n lambda). Exists as a
/// consistency oracle for the lambda -> 0+ limit of min_norm_fit.
FittedModel ridge_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double lambda);

/// One row per coefficient: index, coefficient.
void write_model_csv(const FittedModel& fm, std::ostream& out);

} // namespace lalab
