#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "xsr/data/dataset.hpp"
#include "xsr/explain/dispatch.hpp"
#include "xsr/metrics/accuracy.hpp"
#include "xsr/regress/model.hpp"

namespace xsr::metrics {

struct Neighborhood {
    Eigen::VectorXd center;
    Eigen::MatrixXd points;      // m x d, drawn from N_d(center, lambda * cov(X))
    double lambda = 0.0;
    Eigen::MatrixXd covariance;  // lambda * cov(X) after PSD repair
    bool psd_repaired = false;   // negative eigenvalues above 1e-8 were clipped
};

// Multivariate normal neighborhood via a symmetric eigendecomposition of
// lambda * cov(X); negative eigenvalues are clipped at zero.
Neighborhood neighborhood(const Eigen::VectorXd& x, const Eigen::MatrixXd& X, double lambda, int m,
                          std::uint64_t seed);

// A local explainer bound to its model/config; input is the explained point.
using LocalExplainer = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Mean squared Euclidean distance between the explanation at the center and
// at each neighbor.
double stability(const LocalExplainer& explainer, const Eigen::VectorXd& x, const Neighborhood& nbhd);

// Mean over perturbations p = x - x' of (p . psi(x) - (f(x) - f(x-p)))^2.
double infidelity(const regress::FittedModel& model, const LocalExplainer& explainer,
                  const Eigen::VectorXd& x, const Neighborhood& nbhd);

// Mean Jaccard index between the top-k features (by importance magnitude,
// ties to the lower index) at the center and at each neighbor.
double jaccard_stability(const LocalExplainer& explainer, const Eigen::VectorXd& x,
                         const Neighborhood& nbhd, int k);

// Cosine similarity between a ground-truth explanation and a model
// explanation; degenerate (value 0) when either vector is zero.
Score cosine_quality(const Eigen::VectorXd& truth, const Eigen::VectorXd& values);

// Squared error normalized by the variance of the truth vector; plain MSE
// with the degenerate flag when the truth has zero variance.
Score nmse_quality(const Eigen::VectorXd& truth, const Eigen::VectorXd& values);

// Runs an explainer against the ground-truth expression wrapped as a model,
// under the same config/seed policy as fitted models.
explain::Explanation truth_explanation(const data::GroundTruth& gt,
                                       const explain::ExplainRequest& request,
                                       const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const explain::ExplainerConfig& config, std::uint64_t seed);

}  // namespace xsr::metrics
