#include "lalab/estimators.hpp"

#include "lalab/csv.hpp"
#include "lalab/errors.hpp"

#include <Eigen/SVD>

#include <limits>
#include <ostream>

namespace lalab {

const char* fit_kind_name(FitKind k) {
    switch (k) {
        case FitKind::MinNorm: return "min_norm";
        case FitKind::LookAlike: return "look_alike";
        case FitKind::LookAlikeEstimated: return "look_alike_estimated";
    }
    return "?";
}

namespace {

void check_finite(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    if (!design.allFinite() || !y.allFinite())
        throw NumericalError("fit: non-finite entries in design or response");
    if (y.size() != design.cols())
        throw ConfigError("fit: response length must equal sample count");
    if (design.cols() < 1) throw ConfigError("fit: need at least one sample");
}

} // namespace

FittedModel min_norm_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    check_finite(design, y);
    const Eigen::Index n = design.cols(), d = design.rows();

    // Thin SVD of the n x d regression matrix design^T.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design.transpose(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double rcond = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(n, d));
    const double cutoff = s.size() > 0 ? rcond * s[0] : 0.0;

    FittedModel fm;
    fm.kind = FitKind::MinNorm;
    Eigen::VectorXd uty = svd.matrixU().transpose() * y;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > cutoff && s[i] > 0.0) {
            inv[i] = uty[i] / s[i];
            fm.rank_used += 1;
            fm.sigma_min_kept = s[i]; // singular values are sorted descending
        }
    }
    fm.theta = svd.matrixV() * inv;
    return fm;
}

FittedModel fit_look_alike(const Dataset& ds, const Eigen::MatrixXd& centers_s, FitKind kind) {
    AnonymizedDataset anon = anonymize(ds, centers_s);
    FittedModel fm = min_norm_fit(anon.X_L, anon.y);
    fm.kind = kind;
    return fm;
}

FittedModel fit_look_alike(const Dataset& ds, const GroundTruth& gt, CentersMode mode) {
    if (mode == CentersMode::TrueCenters)
        return fit_look_alike(ds, gt.sensitive_centers(), FitKind::LookAlike);
    return fit_look_alike(ds, empirical_centers(ds), FitKind::LookAlike);
}

FittedModel ridge_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("ridge_fit: lambda must be > 0");
    check_finite(design, y);
    const Eigen::Index n = design.cols(), d = design.rows();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(design.transpose(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double rcond = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(n, d));
    const double cutoff = s.size() > 0 ? rcond * s[0] : 0.0;
    const double reg = 2.0 * static_cast<double>(n) * lambda;

    FittedModel fm;
    fm.kind = FitKind::MinNorm;
    Eigen::VectorXd uty = svd.matrixU().transpose() * y;
    Eigen::VectorXd shrunk = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        shrunk[i] = s[i] / (s[i] * s[i] + reg) * uty[i];
        if (s[i] > cutoff && s[i] > 0.0) {
            fm.rank_used += 1;
            fm.sigma_min_kept = s[i];
        }
    }
    fm.theta = svd.matrixV() * shrunk;
    return fm;
}

void write_model_csv(const FittedModel& fm, std::ostream& out) {
    out << csv::join_row({"index", "coefficient"});
    for (Eigen::Index i = 0; i < fm.theta.size(); ++i)
        out << csv::join_row({csv::format_int(i), csv::format_double(fm.theta[i])});
}

} // namespace lalab
