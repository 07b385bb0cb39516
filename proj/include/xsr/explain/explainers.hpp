#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "xsr/regress/model.hpp"

namespace xsr::explain {

enum class Scope { Local, Global };

struct Explanation {
    Eigen::VectorXd values;                   // signed importance per feature
    Scope scope = Scope::Global;
    std::optional<Eigen::VectorXd> reference; // explained point for local scope
    std::string explainer;
    std::string model;
    double seconds = 0.0;
    nlohmann::json meta;                      // method-specific extras
};

struct ExplainerConfig {
    int permutation_repeats = 10;     // K
    int shap_exact_cutoff = 12;       // exact coalition enumeration up to this d (max 20)
    int shap_samples = 256;           // Monte Carlo permutations above the cutoff
    int lime_samples = 1000;          // r
    double lime_kernel_width = 0.0;   // 0 selects sqrt(d) * 0.75
    int ela_neighbors = 20;           // k
    int morris_trajectories = 10;
    int morris_levels = 8;            // p
    int ig_steps = 128;               // m
    bool ig_zero_baseline = false;    // default baseline is the training mean
    int sage_rows = 0;                // rows used for the MI estimate; 0 = all
    int global_rows = 0;              // rows averaged by *_global; 0 = all

    void validate() const;
};

// R^2 drop under per-column shuffling, K repeats per feature.
Explanation permutation_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, int repeats, std::uint64_t seed);

// Kernel-weighted local linear surrogate on Gaussian samples around x.
Explanation lime_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& x, const ExplainerConfig& config, std::uint64_t seed);

// Local linear fit on the k nearest training rows; distances restricted to
// the model's selected features when a mask is present.
Explanation ela_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& x, int k);

// Shapley values with interventional mean-imputation removal; exact coalition
// enumeration for d <= cutoff, permutation sampling otherwise.
Explanation shap_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& x, const ExplainerConfig& config, std::uint64_t seed);

// Mean absolute local Shapley value across the training rows.
Explanation shap_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                        const ExplainerConfig& config, std::uint64_t seed);

// Shapley aggregation of predictive-power differences, with predictive power
// estimated as histogram mutual information between predictions and targets.
Explanation sage_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& y, const ExplainerConfig& config,
                        std::uint64_t seed);

// Signed mean elementary effect over one-at-a-time trajectories on a p-level
// grid; the mean absolute effect is kept in meta.
Explanation morris_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                          const ExplainerConfig& config, std::uint64_t seed);

// Integrated gradients along the straight path from the baseline, trapezoidal
// rule over m points; analytic gradients when the model has a symbolic form.
Explanation ig_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& x, const ExplainerConfig& config);

// Partial effects: the symbolic gradient evaluated at x. Requires a model
// with a symbolic form.
Explanation pe_local(const regress::FittedModel& model, const Eigen::VectorXd& x);

// Mean absolute partial effect across the training rows.
Explanation pe_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                      const ExplainerConfig& config);

// Random rank baseline: a fresh uniform permutation of 1..d per call.
Explanation random_local(const Eigen::VectorXd& x, int dimension, std::uint64_t seed);
Explanation random_global(int dimension, std::uint64_t seed);

// Raised when an explainer does not support the requested model (e.g.
// partial effects on a model without a symbolic form).
class UnsupportedExplainer : public Error {
public:
    explicit UnsupportedExplainer(const std::string& message) : Error(message) {}
};

}  // namespace xsr::explain
