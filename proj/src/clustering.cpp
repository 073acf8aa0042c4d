#include "lalab/clustering.hpp"

#include "lalab/errors.hpp"
#include "lalab/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace lalab {

namespace {

// Squared distances from every column of Xs to the nearest chosen center.
void update_min_dist2(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& center,
                      Eigen::VectorXd& min_dist2) {
    for (Eigen::Index i = 0; i < Xs.cols(); ++i) {
        const double d2 = (Xs.col(i) - center).squaredNorm();
        if (d2 < min_dist2[i]) min_dist2[i] = d2;
    }
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& Xs, int k, Rng& rng) {
    const Eigen::Index n = Xs.cols();
    Eigen::MatrixXd centers(Xs.rows(), k);
    const int first = rng.uniform_int(0, static_cast<int>(n) - 1);
    centers.col(0) = Xs.col(first);

    Eigen::VectorXd min_dist2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        update_min_dist2(Xs, centers.col(c - 1), min_dist2);
        if (min_dist2.sum() > 0.0) {
            centers.col(c) = Xs.col(rng.categorical(min_dist2));
        } else {
            // Fewer distinct points than centers requested; duplicate any.
            centers.col(c) = Xs.col(rng.uniform_int(0, static_cast<int>(n) - 1));
        }
    }
    return centers;
}

int nearest_center(const Eigen::MatrixXd& centers, const Eigen::VectorXd& x) {
    int best = 0;
    double best_d2 = (x - centers.col(0)).squaredNorm();
    for (int c = 1; c < centers.cols(); ++c) {
        const double d2 = (x - centers.col(c)).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = c;
        }
    }
    return best;
}

} // namespace

ClusterEstimate kmeans(const Eigen::MatrixXd& Xs, int k, Rng& rng, int max_iter) {
    const Eigen::Index n = Xs.cols(), p = Xs.rows();
    if (k < 1) throw ConfigError("kmeans: k must be >= 1");
    if (k > n) throw ConfigError("kmeans: k must be <= number of points");
    if (max_iter < 1) throw ConfigError("kmeans: max_iter must be >= 1");

    ClusterEstimate est;
    est.centers_s = kmeanspp_init(Xs, k, rng);
    est.labels = Eigen::VectorXi::Constant(n, -1);

    for (int it = 0; it < max_iter; ++it) {
        est.iterations = it + 1;
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = nearest_center(est.centers_s, Xs.col(i));
            if (c != est.labels[i]) {
                est.labels[i] = c;
                changed = true;
            }
        }
        if (!changed) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(p, k);
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.col(est.labels[i]) += Xs.col(i);
            counts[est.labels[i]] += 1;
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                est.centers_s.col(c) = sums.col(c) / counts[c];
            } else {
                // Re-seed an emptied cluster from the farthest point.
                Eigen::Index far = 0;
                double far_d2 = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d2 = (Xs.col(i) - est.centers_s.col(est.labels[i])).squaredNorm();
                    if (d2 > far_d2) {
                        far_d2 = d2;
                        far = i;
                    }
                }
                est.centers_s.col(c) = Xs.col(far);
            }
        }
    }

    est.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        est.inertia += (Xs.col(i) - est.centers_s.col(est.labels[i])).squaredNorm();
    return est;
}

ClusterEstimate kmeans_best_of(const Eigen::MatrixXd& Xs, int k, std::uint64_t seed,
                               int restarts, int max_iter, int threads) {
    if (restarts < 1) throw ConfigError("kmeans_best_of: restarts must be >= 1");
    std::vector<ClusterEstimate> runs(restarts);
    parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t r) {
        Rng rng(derive_seed(seed, 0xC1A5 /* restart stream */, r));
        runs[r] = kmeans(Xs, k, rng, max_iter);
    }, threads);
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].inertia < runs[best].inertia) best = r;
    return runs[best];
}

Eigen::MatrixXd centers_product(const Eigen::MatrixXd& centers_s, const Eigen::VectorXi& labels) {
    Eigen::MatrixXd out(centers_s.rows(), labels.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= centers_s.cols())
            throw ConfigError("centers_product: label out of range");
        out.col(i) = centers_s.col(labels[i]);
    }
    return out;
}

double delta_rate(const Eigen::MatrixXd& ms_lambda_true, const Eigen::MatrixXd& ms_lambda_est) {
    if (ms_lambda_true.rows() != ms_lambda_est.rows() ||
        ms_lambda_true.cols() != ms_lambda_est.cols())
        throw ConfigError("delta_rate: shape mismatch");
    const Eigen::MatrixXd diff = ms_lambda_true - ms_lambda_est;
    if (diff.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(diff);
    return svd.singularValues()[0] / std::sqrt(static_cast<double>(diff.cols()));
}

double pinv_perturbation_bound(double sigma_min_a, double sigma_min_b, double diff_norm) {
    if (!(sigma_min_a > 0.0) || !(sigma_min_b > 0.0))
        throw NumericalError("pinv_perturbation_bound: sigma_min must be > 0");
    if (!(diff_norm >= 0.0))
        throw NumericalError("pinv_perturbation_bound: diff_norm must be >= 0");
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double worst = std::max(1.0 / (sigma_min_a * sigma_min_a), 1.0 / (sigma_min_b * sigma_min_b));
    return golden * worst * diff_norm;
}

PerturbationCondition perturbation_condition(double psi_d, double psi_p, double delta) {
    if (!(delta >= 0.0)) throw ConfigError("perturbation_condition: delta must be >= 0");
    const double g = psi_d - psi_p;
    if (g < 0.5 && delta < std::sqrt(1.0 - g) - std::sqrt(g))
        return PerturbationCondition::ConditionI;
    if (g > 2.0 && delta < std::sqrt(g - 1.0) - 1.0)
        return PerturbationCondition::ConditionII;
    return PerturbationCondition::Neither;
}

Eigen::VectorXi flip_labels(const Eigen::VectorXi& labels, int k, int n_flips, Rng& rng) {
    const Eigen::Index n = labels.size();
    if (n_flips < 0 || n_flips > n)
        throw ConfigError("flip_labels: n_flips must lie in [0, n]");
    if (k < 2 && n_flips > 0)
        throw ConfigError("flip_labels: flipping requires k >= 2");

    // Partial Fisher-Yates: the first n_flips entries of idx are a uniform
    // sample without replacement.
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Eigen::VectorXi out = labels;
    for (int t = 0; t < n_flips; ++t) {
        const int j = rng.uniform_int(t, static_cast<int>(n) - 1);
        std::swap(idx[t], idx[j]);
        const Eigen::Index i = idx[t];
        int new_label = rng.uniform_int(0, k - 2);
        if (new_label >= labels[i]) new_label += 1;
        out[i] = new_label;
    }
    return out;
}

} // namespace lalab
