#include "lalab/data.hpp"

#include "lalab/csv.hpp"
#include "lalab/errors.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace lalab {

Eigen::MatrixXd Dataset::lambda() const {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, n());
    for (Eigen::Index i = 0; i < labels.size(); ++i) L(labels[i], i) = 1.0;
    return L;
}

Dataset sample_dataset(const ProblemConfig& cfg, const GroundTruth& gt, Rng& rng) {
    cfg.validate();
    if (gt.d() != cfg.d || gt.p() != cfg.p || gt.k() != cfg.k)
        throw ConfigError("sample_dataset: config and ground truth dimensions disagree");

    const Eigen::Index n = cfg.n, d = cfg.d;
    Dataset ds;
    ds.k = cfg.k;
    ds.p = cfg.p;
    ds.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) ds.labels[i] = rng.categorical(cfg.priors);

    ds.X = rng.gaussian_matrix(d, n);
    for (Eigen::Index i = 0; i < n; ++i) ds.X.col(i) += gt.M.col(ds.labels[i]);

    const Eigen::VectorXd theta0 = gt.theta0();
    ds.y = ds.X.transpose() * theta0;
    if (cfg.sigma > 0.0)
        for (Eigen::Index i = 0; i < n; ++i) ds.y[i] += cfg.sigma * rng.normal();
    return ds;
}

AnonymizedDataset anonymize(const Dataset& ds, const Eigen::MatrixXd& centers_s) {
    if (centers_s.cols() != ds.k)
        throw ConfigError("anonymize: centers_s must have k columns");
    if (centers_s.rows() != ds.p)
        throw ConfigError("anonymize: centers_s must have p rows");

    AnonymizedDataset out;
    out.y = ds.y;
    out.labels = ds.labels;
    out.k = ds.k;
    out.p = ds.p;
    out.X_L = ds.X;
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        out.X_L.col(i).head(ds.p) = centers_s.col(ds.labels[i]);
    return out;
}

Eigen::MatrixXd empirical_centers(const Dataset& ds) {
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(ds.p, ds.k);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(ds.k);
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        centers.col(ds.labels[i]) += ds.X.col(i).head(ds.p);
        counts[ds.labels[i]] += 1;
    }
    for (int l = 0; l < ds.k; ++l) {
        if (counts[l] == 0)
            throw NumericalError("empirical_centers: cluster " + std::to_string(l) + " is empty");
        centers.col(l) /= counts[l];
    }
    return centers;
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    std::vector<std::string> header = {"label", "y"};
    for (Eigen::Index j = 0; j < ds.d(); ++j)
        header.push_back("x" + std::to_string(j + 1));
    out << csv::join_row(header);
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        std::vector<std::string> row;
        row.reserve(2 + ds.d());
        row.push_back(csv::format_int(ds.labels[i]));
        row.push_back(csv::format_double(ds.y[i]));
        for (Eigen::Index j = 0; j < ds.d(); ++j)
            row.push_back(csv::format_double(ds.X(j, i)));
        out << csv::join_row(row);
    }
}

} // namespace lalab
