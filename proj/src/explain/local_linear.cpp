#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "xsr/common/rng.hpp"
#include "xsr/explain/explainers.hpp"

namespace xsr::explain {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Weighted least squares with intercept; minimum-norm solution (flagged)
// when the weighted design is rank deficient.
std::pair<Eigen::VectorXd, bool> weighted_linear_fit(const Eigen::MatrixXd& Z,
                                                     const Eigen::VectorXd& target,
                                                     const Eigen::VectorXd& weights) {
    const Eigen::Index n = Z.rows();
    const Eigen::Index d = Z.cols();
    Eigen::MatrixXd design(n, d + 1);
    design.col(0).setOnes();
    design.rightCols(d) = Z;

    const Eigen::VectorXd sqrt_w = weights.cwiseSqrt();
    const Eigen::MatrixXd weighted = sqrt_w.asDiagonal() * design;
    const Eigen::VectorXd weighted_target = sqrt_w.asDiagonal() * target;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
    if (qr.rank() == d + 1) {
        return {qr.solve(weighted_target), false};
    }
    const Eigen::VectorXd solution =
        weighted.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(weighted_target);
    return {solution, true};
}

}  // namespace

Explanation lime_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& x, const ExplainerConfig& config,
                       std::uint64_t seed) {
    config.validate();
    const Stopwatch watch;
    const int d = static_cast<int>(X.cols());
    const int r = config.lime_samples;
    if (r < d + 1) throw ContractError("lime requires at least d+1 samples");

    // Per-feature spread of the training data drives both the sampling
    // distribution and the kernel's distance scaling.
    Eigen::VectorXd deviation(d);
    for (int j = 0; j < d; ++j) {
        const double mean = X.col(j).mean();
        const double variance = (X.col(j).array() - mean).square().sum() /
                                static_cast<double>(X.rows());
        deviation[j] = variance > 0 ? std::sqrt(variance) : 1.0;
    }
    const double width = config.lime_kernel_width > 0
                             ? config.lime_kernel_width
                             : std::sqrt(static_cast<double>(d)) * 0.75;

    Rng rng(mix_seed(seed));
    Eigen::MatrixXd samples(r, d);
    Eigen::VectorXd target(r);
    Eigen::VectorXd weights(r);
    Eigen::VectorXd point(d);
    for (int i = 0; i < r; ++i) {
        double scaled_squared_distance = 0.0;
        for (int j = 0; j < d; ++j) {
            const double z = rng.normal();
            point[j] = x[j] + deviation[j] * z;
            scaled_squared_distance += z * z;
        }
        samples.row(i) = point;
        target[i] = model.predict(point);
        weights[i] = std::exp(-scaled_squared_distance / (width * width));
    }

    const auto [solution, degenerate] = weighted_linear_fit(samples, target, weights);

    Explanation explanation;
    explanation.values = solution.tail(d);
    explanation.scope = Scope::Local;
    explanation.reference = x;
    explanation.explainer = "lime";
    explanation.model = model.kind();
    explanation.meta = {{"samples", r}, {"kernel_width", width}, {"degenerate_fit", degenerate}};
    explanation.seconds = watch.seconds();
    return explanation;
}

Explanation ela_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& x, int k) {
    const Stopwatch watch;
    const Eigen::Index n = X.rows();
    const int d = static_cast<int>(X.cols());
    if (k < 1 || k > n) throw ContractError("ela requires 1 <= k <= n");

    // Neighbor distances use only the model's selected features when the
    // model exposes a selection mask.
    std::vector<int> distance_features;
    if (model.selected_features()) {
        const auto& mask = *model.selected_features();
        for (int j = 0; j < d; ++j) {
            if (mask[static_cast<std::size_t>(j)]) distance_features.push_back(j);
        }
    }
    if (distance_features.empty()) {
        distance_features.resize(static_cast<std::size_t>(d));
        std::iota(distance_features.begin(), distance_features.end(), 0);
    }

    std::vector<std::pair<double, Eigen::Index>> distances;
    distances.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double squared = 0.0;
        for (const int j : distance_features) {
            const double diff = X(i, j) - x[j];
            squared += diff * diff;
        }
        distances.emplace_back(squared, i);
    }
    std::partial_sort(distances.begin(), distances.begin() + k, distances.end());

    Eigen::MatrixXd neighbors(k, d);
    Eigen::VectorXd target(k);
    Eigen::VectorXd row(d);
    for (int i = 0; i < k; ++i) {
        neighbors.row(i) = X.row(distances[static_cast<std::size_t>(i)].second);
        row = neighbors.row(i);
        target[i] = model.predict(row);
    }

    const auto [solution, degenerate] =
        weighted_linear_fit(neighbors, target, Eigen::VectorXd::Ones(k));

    Explanation explanation;
    explanation.values = solution.tail(d);
    explanation.scope = Scope::Local;
    explanation.reference = x;
    explanation.explainer = "ela";
    explanation.model = model.kind();
    explanation.meta = {{"k", k},
                        {"masked_distance", model.selected_features().has_value()},
                        {"degenerate_fit", degenerate || k < d + 1}};
    explanation.seconds = watch.seconds();
    return explanation;
}

}  // namespace xsr::explain
