#include "lalab/rng.hpp"

#include "lalab/errors.hpp"

namespace lalab {

int Rng::categorical(const Eigen::VectorXd& weights) {
    const Eigen::Index k = weights.size();
    if (k == 0) throw NumericalError("categorical: empty weight vector");
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(weights[i] >= 0.0)) throw NumericalError("categorical: negative weight");
        total += weights[i];
    }
    if (total <= 0.0) throw NumericalError("categorical: weights sum to zero");
    double u = uniform() * total;
    double cum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        cum += weights[i];
        if (u < cum) return static_cast<int>(i);
    }
    // u landed on the top edge (rounding); last positive-weight bucket wins.
    for (Eigen::Index i = k - 1; i >= 0; --i)
        if (weights[i] > 0.0) return static_cast<int>(i);
    return static_cast<int>(k - 1);
}

Eigen::VectorXd Rng::gaussian_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
}

Eigen::MatrixXd Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
}

} // namespace lalab
