#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "xsr/regress/model.hpp"

namespace xsr::regress {

// Ordered named axes; the grid is their Cartesian product, enumerated with
// the first axis varying slowest so ties resolve in declaration order.
struct HyperGrid {
    std::vector<std::pair<std::string, std::vector<double>>> axes;

    bool empty() const { return axes.empty(); }
    std::size_t cells() const;
    nlohmann::json cell(std::size_t index) const;
};

using Trainer = std::function<FittedModel(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const nlohmann::json& params, std::uint64_t seed)>;

struct CvCell {
    nlohmann::json params;
    std::vector<double> fold_r2;
    double mean_r2 = 0.0;
};

struct GridSearchResult {
    nlohmann::json best_params;
    std::size_t best_index = 0;
    std::vector<CvCell> table;
};

// Exhaustive grid search with a shuffled 3-fold split fixed by seed,
// selecting the cell with the highest mean validation R^2 (first-in-grid
// order on ties). An empty grid returns a single empty-parameter cell.
GridSearchResult grid_search(const Trainer& trainer, const HyperGrid& grid,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             std::uint64_t seed);

// A registered regressor: stock hyper-parameter grid plus its trainer.
struct RegressorSpec {
    std::string id;
    bool stochastic = false;
    HyperGrid default_grid;
    Trainer trainer;
};

const std::vector<RegressorSpec>& regressor_registry();
const RegressorSpec& find_regressor(std::string_view id);

}  // namespace xsr::regress
