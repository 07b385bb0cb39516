#pragma once

#include <Eigen/Core>

namespace xsr::metrics {

// A measure value plus a degeneracy marker (e.g. zero-variance reference).
struct Score {
    double value = 0.0;
    bool degenerate = false;
};

// Coefficient of determination. Degenerate when var(y) == 0; the value is
// then 1 for a perfect fit and 0 otherwise.
Score r2(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y);

double mae(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y);

// MSE / var(y); plain MSE with the degenerate flag when var(y) == 0.
Score nmse(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y);

}  // namespace xsr::metrics
