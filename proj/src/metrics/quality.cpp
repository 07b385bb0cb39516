#include <cmath>

#include "xsr/metrics/robustness.hpp"

namespace xsr::metrics {

Score cosine_quality(const Eigen::VectorXd& truth, const Eigen::VectorXd& values) {
    if (truth.size() != values.size()) throw ContractError("explanation length mismatch");
    const double truth_norm = truth.norm();
    const double values_norm = values.norm();
    if (truth_norm == 0.0 || values_norm == 0.0) {
        return {0.0, true};
    }
    return {truth.dot(values) / (truth_norm * values_norm), false};
}

Score nmse_quality(const Eigen::VectorXd& truth, const Eigen::VectorXd& values) {
    if (truth.size() != values.size()) throw ContractError("explanation length mismatch");
    if (truth.size() < 1) throw ContractError("explanations must be non-empty");
    const double sse = (truth - values).squaredNorm();
    const double truth_mean = truth.mean();
    const double truth_variance = (truth.array() - truth_mean).square().sum();
    if (truth_variance == 0.0) {
        // Plain MSE, flagged: every feature of the reference explanation has
        // the same importance.
        return {sse / static_cast<double>(truth.size()), true};
    }
    return {sse / truth_variance, false};
}

explain::Explanation truth_explanation(const data::GroundTruth& gt,
                                       const explain::ExplainRequest& request,
                                       const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const explain::ExplainerConfig& config, std::uint64_t seed) {
    const regress::FittedModel truth_model =
        regress::FittedModel::from_tree(gt.tree, "truth", gt.space.dimension());
    return explain::run_explainer(request, truth_model, X, y, config, seed);
}

}  // namespace xsr::metrics
