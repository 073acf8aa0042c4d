#pragma once

// Test-only reference implementations. Each oracle takes a route through
// the math that is independent of the library code it checks.

#include <Eigen/Dense>

#include <random>

namespace oracles {

/// Minimum-norm least squares via the normal equations: theta =
/// pinv(design design^T) design y, with the pseudoinverse formed from a
/// dense eigendecomposition of the d x d Gram matrix.
inline Eigen::VectorXd min_norm_normal_equations(const Eigen::MatrixXd& design,
                                                 const Eigen::VectorXd& y) {
    const Eigen::Index d = design.rows();
    const Eigen::MatrixXd gram = design * design.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd& evals = eig.eigenvalues();
    const double cutoff = 1e-12 * std::max(evals[d - 1], 0.0);
    const Eigen::VectorXd rhs = eig.eigenvectors().transpose() * (design * y);
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i)
        if (evals[i] > cutoff && evals[i] > 0.0) scaled[i] = rhs[i] / evals[i];
    return eig.eigenvectors() * scaled;
}

/// Spectral norm by power iteration on A^T A.
inline double spectral_norm_power_iteration(const Eigen::MatrixXd& a, int iters = 500,
                                            unsigned seed = 7) {
    if (a.size() == 0) return 0.0;
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(gen);
    v.normalize();
    double s = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd w = a.transpose() * (a * v);
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        v = w / n;
        const double next = (a * v).norm();
        if (std::abs(next - s) <= 1e-14 * std::max(1.0, next) && it > 10) return next;
        s = next;
    }
    return s;
}

/// Haar-ish random orthogonal matrix (QR of a Gaussian square matrix).
inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = nd(gen);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

} // namespace oracles
