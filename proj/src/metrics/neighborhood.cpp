#include <cmath>

#include <Eigen/Dense>

#include "xsr/common/rng.hpp"
#include "xsr/metrics/robustness.hpp"

namespace xsr::metrics {

Neighborhood neighborhood(const Eigen::VectorXd& x, const Eigen::MatrixXd& X, double lambda, int m,
                          std::uint64_t seed) {
    if (!(lambda > 0)) throw ContractError("neighborhood requires lambda > 0");
    if (m < 1) throw ContractError("neighborhood requires m >= 1");
    const Eigen::Index d = X.cols();
    if (x.size() != d) throw ContractError("point dimension does not match the training matrix");

    // Sample covariance (n-1 denominator), scaled by lambda.
    const Eigen::RowVectorXd means = X.colwise().mean();
    const Eigen::MatrixXd centered = X.rowwise() - means;
    const double denom = std::max<double>(1.0, static_cast<double>(X.rows() - 1));
    Eigen::MatrixXd sigma = lambda * (centered.transpose() * centered) / denom;

    Neighborhood nbhd;
    nbhd.center = x;
    nbhd.lambda = lambda;

    // Symmetric factorization with eigenvalue clipping for PSD repair.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(sigma);
    Eigen::VectorXd eigenvalues = eigen.eigenvalues();
    for (Eigen::Index i = 0; i < d; ++i) {
        if (eigenvalues[i] < 0) {
            if (eigenvalues[i] < -1e-8) nbhd.psd_repaired = true;
            eigenvalues[i] = 0.0;
        }
    }
    const Eigen::MatrixXd factor =
        eigen.eigenvectors() * eigenvalues.cwiseSqrt().asDiagonal();
    nbhd.covariance = factor * factor.transpose();

    Rng rng(mix_seed(seed));
    nbhd.points.resize(m, d);
    Eigen::VectorXd z(d);
    for (int i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
        nbhd.points.row(i) = (x + factor * z).transpose();
    }
    return nbhd;
}

}  // namespace xsr::metrics
