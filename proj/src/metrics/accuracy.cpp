#include "xsr/metrics/accuracy.hpp"

#include "xsr/common/error.hpp"

namespace xsr::metrics {

namespace {

void check_lengths(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
    if (yhat.size() != y.size()) throw ContractError("prediction/target length mismatch");
    if (y.size() < 2) throw ContractError("accuracy metrics require at least two observations");
}

double centered_sum_of_squares(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    return (y.array() - mean).square().sum();
}

}  // namespace

Score r2(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
    check_lengths(yhat, y);
    const double sse = (y - yhat).squaredNorm();
    const double sst = centered_sum_of_squares(y);
    if (sst == 0.0) {
        return {sse == 0.0 ? 1.0 : 0.0, true};
    }
    return {1.0 - sse / sst, false};
}

double mae(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
    check_lengths(yhat, y);
    return (y - yhat).array().abs().mean();
}

Score nmse(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
    check_lengths(yhat, y);
    const double mse = (y - yhat).squaredNorm() / static_cast<double>(y.size());
    const double variance = centered_sum_of_squares(y) / static_cast<double>(y.size());
    if (variance == 0.0) {
        return {mse, true};
    }
    return {mse / variance, false};
}

}  // namespace xsr::metrics
