#include <chrono>
#include <cmath>

#include "xsr/common/rng.hpp"
#include "xsr/explain/explainers.hpp"

namespace xsr::explain {

Explanation morris_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                          const ExplainerConfig& config, std::uint64_t seed) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const int d = static_cast<int>(X.cols());
    const int levels = config.morris_levels;

    const Eigen::VectorXd lower = X.colwise().minCoeff();
    const Eigen::VectorXd upper = X.colwise().maxCoeff();
    Eigen::VectorXd level_width(d), delta(d);
    for (int j = 0; j < d; ++j) {
        const double range = upper[j] - lower[j];
        level_width[j] = range > 0 ? range / (levels - 1) : 1.0;
        delta[j] = range > 0 ? range / (2.0 * (levels - 1)) : 0.5;
    }

    Rng rng(mix_seed(seed));
    Eigen::VectorXd signed_sum = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd absolute_sum = Eigen::VectorXd::Zero(d);

    for (int t = 0; t < config.morris_trajectories; ++t) {
        // Start at a training row snapped to the level grid.
        Eigen::VectorXd point = X.row(rng.index(static_cast<int>(X.rows()))).transpose();
        for (int j = 0; j < d; ++j) {
            const double snapped = std::round((point[j] - lower[j]) / level_width[j]);
            point[j] = lower[j] + snapped * level_width[j];
        }
        double value = model.predict(point);

        // One-at-a-time steps in a fresh feature order; direction flips at
        // the domain boundary.
        for (const int j : rng.permutation(d)) {
            double step = rng.uniform01() < 0.5 ? delta[j] : -delta[j];
            if (point[j] + step > upper[j] || point[j] + step < lower[j]) step = -step;
            point[j] += step;
            const double moved = model.predict(point);
            const double effect = (moved - value) / step;
            signed_sum[j] += effect;
            absolute_sum[j] += std::abs(effect);
            value = moved;
        }
    }

    Explanation explanation;
    explanation.values = signed_sum / static_cast<double>(config.morris_trajectories);
    explanation.scope = Scope::Global;
    explanation.explainer = "morris";
    explanation.model = model.kind();
    explanation.meta = {{"trajectories", config.morris_trajectories},
                        {"levels", levels},
                        {"mean_absolute",
                         std::vector<double>((absolute_sum / config.morris_trajectories).begin(),
                                             (absolute_sum / config.morris_trajectories).end())}};
    explanation.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return explanation;
}

}  // namespace xsr::explain
