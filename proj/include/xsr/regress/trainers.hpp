#pragma once

#include <climits>
#include <cstdint>

#include <Eigen/Core>

#include "xsr/expr/node.hpp"
#include "xsr/regress/model.hpp"

namespace xsr::regress {

// Ordinary least squares through a rank-revealing QR; falls back to the
// minimum-norm SVD solution (flagged) on rank deficiency.
FittedModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct LassoOptions {
    double tolerance = 1e-6;   // duality gap
    int max_sweeps = 10000;
};

// Coordinate descent on (1/2n)||y - Xb||^2 + alpha * ||b||_1 with internal
// standardization; coefficients are reported on the original scale.
FittedModel fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                      const LassoOptions& options = {});

// Mean target of the k nearest training rows (Euclidean), ties by row index.
FittedModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k);

struct TreeOptions {
    int max_depth = INT_MAX;
    int max_leaf_nodes = INT_MAX;
    int min_samples_split = 2;
};

// CART with variance-reduction splits and best-first growth.
FittedModel fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeOptions& options);

struct ForestOptions {
    int n_estimators = 100;
    double min_samples_split = 0.01;  // fraction of the training size
    bool bootstrap = true;
    int max_depth = INT_MAX;
    int max_leaf_nodes = INT_MAX;
};

// Bootstrap-bagged CART ensemble with ceil(d/3) random feature subsetting
// per split; the benchmark's black-box representative.
FittedModel fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ForestOptions& options, std::uint64_t seed);

struct IteaOptions {
    int popsize = 100;
    int generations = 100;
    int max_terms = 10;
    int max_strength = 3;
    int max_initial_terms = 4;
};

// Interaction-transformation evolution: mutation-only variation with
// (mu + lambda) survival between parent and mutant, coefficients by OLS on
// the transformed term matrix, fitness = training NMSE.
FittedModel fit_itea(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const IteaOptions& options,
                     std::uint64_t seed);

struct GpnlsOptions {
    int population_size = 100;
    int generations = 100;
    int max_depth = 10;
    int max_size = 50;
    int tournament_size = 3;
    double mutation_probability = 0.25;
    int lm_iterations = 25;
};

// Tree GP where each fitness evaluation expands the candidate with scale,
// offset and per-leaf coefficients and fits them by Levenberg-Marquardt.
// The expansion never persists into crossover or mutation.
FittedModel fit_gpnls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const GpnlsOptions& options, std::uint64_t seed);

}  // namespace xsr::regress
