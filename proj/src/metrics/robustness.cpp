#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "xsr/metrics/robustness.hpp"

namespace xsr::metrics {

double stability(const LocalExplainer& explainer, const Eigen::VectorXd& x, const Neighborhood& nbhd) {
    const Eigen::VectorXd at_center = explainer(x);
    double total = 0.0;
    for (Eigen::Index i = 0; i < nbhd.points.rows(); ++i) {
        total += (at_center - explainer(nbhd.points.row(i).transpose())).squaredNorm();
    }
    return total / static_cast<double>(nbhd.points.rows());
}

double infidelity(const regress::FittedModel& model, const LocalExplainer& explainer,
                  const Eigen::VectorXd& x, const Neighborhood& nbhd) {
    const Eigen::VectorXd at_center = explainer(x);
    const double f_x = model.predict(x);
    double total = 0.0;
    for (Eigen::Index i = 0; i < nbhd.points.rows(); ++i) {
        const Eigen::VectorXd p = x - nbhd.points.row(i).transpose();
        const double delta = f_x - model.predict((x - p).eval());
        const double term = p.dot(at_center) - delta;
        total += term * term;
    }
    return total / static_cast<double>(nbhd.points.rows());
}

namespace {

// Top-k feature indices by |importance|, ties toward the lower index.
std::vector<int> top_k(const Eigen::VectorXd& values, int k) {
    std::vector<int> indices(static_cast<std::size_t>(values.size()));
    std::iota(indices.begin(), indices.end(), 0);
    std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
        return std::abs(values[a]) > std::abs(values[b]);
    });
    indices.resize(static_cast<std::size_t>(k));
    std::sort(indices.begin(), indices.end());
    return indices;
}

}  // namespace

double jaccard_stability(const LocalExplainer& explainer, const Eigen::VectorXd& x,
                         const Neighborhood& nbhd, int k) {
    if (k < 1 || k > x.size()) throw ContractError("jaccard stability requires 1 <= k <= d");
    const std::vector<int> center = top_k(explainer(x), k);
    double total = 0.0;
    for (Eigen::Index i = 0; i < nbhd.points.rows(); ++i) {
        const std::vector<int> neighbor = top_k(explainer(nbhd.points.row(i).transpose()), k);
        std::vector<int> intersection;
        std::set_intersection(center.begin(), center.end(), neighbor.begin(), neighbor.end(),
                              std::back_inserter(intersection));
        const double unions = static_cast<double>(2 * k - intersection.size());
        total += static_cast<double>(intersection.size()) / unions;
    }
    return total / static_cast<double>(nbhd.points.rows());
}

}  // namespace xsr::metrics
