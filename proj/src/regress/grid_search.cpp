#include <numeric>

#include "xsr/common/rng.hpp"
#include "xsr/metrics/accuracy.hpp"
#include "xsr/regress/grid_search.hpp"
#include "xsr/regress/trainers.hpp"

namespace xsr::regress {

std::size_t HyperGrid::cells() const {
    std::size_t total = 1;
    for (const auto& [name, values] : axes) {
        if (values.empty()) throw ContractError("hyper-grid axis '" + name + "' is empty");
        total *= values.size();
    }
    return total;
}

nlohmann::json HyperGrid::cell(std::size_t index) const {
    nlohmann::json params = nlohmann::json::object();
    // First axis varies slowest.
    std::size_t stride = cells();
    for (const auto& [name, values] : axes) {
        stride /= values.size();
        params[name] = values[(index / stride) % values.size()];
    }
    return params;
}

GridSearchResult grid_search(const Trainer& trainer, const HyperGrid& grid,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             std::uint64_t seed) {
    const Eigen::Index n = X.rows();
    if (n < 3) throw ContractError("grid search requires at least 3 observations");

    // Shuffled contiguous 3-fold split, fixed by seed.
    Rng rng(mix_seed(seed));
    std::vector<int> order = rng.permutation(static_cast<int>(n));
    constexpr int kFolds = 3;

    GridSearchResult result;
    double best_mean = -std::numeric_limits<double>::infinity();
    const std::size_t cells = grid.cells();
    for (std::size_t cell = 0; cell < cells; ++cell) {
        CvCell row;
        row.params = grid.cell(cell);
        for (int fold = 0; fold < kFolds; ++fold) {
            const auto lo = static_cast<std::size_t>(fold) * static_cast<std::size_t>(n) / kFolds;
            const auto hi = (static_cast<std::size_t>(fold) + 1) * static_cast<std::size_t>(n) / kFolds;
            const auto valid_count = static_cast<Eigen::Index>(hi - lo);
            const Eigen::Index train_count = n - valid_count;

            Eigen::MatrixXd X_train(train_count, X.cols());
            Eigen::VectorXd y_train(train_count);
            Eigen::MatrixXd X_valid(valid_count, X.cols());
            Eigen::VectorXd y_valid(valid_count);
            Eigen::Index ti = 0, vi = 0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
                const int row_index = order[i];
                if (i >= lo && i < hi) {
                    X_valid.row(vi) = X.row(row_index);
                    y_valid[vi++] = y[row_index];
                } else {
                    X_train.row(ti) = X.row(row_index);
                    y_train[ti++] = y[row_index];
                }
            }

            const std::uint64_t fold_seed = derive_seed(seed, std::string_view("cv"), cell,
                                                        static_cast<std::uint64_t>(fold));
            const FittedModel model = trainer(X_train, y_train, row.params, fold_seed);
            row.fold_r2.push_back(metrics::r2(model.predict_batch(X_valid), y_valid).value);
        }
        row.mean_r2 = std::accumulate(row.fold_r2.begin(), row.fold_r2.end(), 0.0) / kFolds;
        if (row.mean_r2 > best_mean) {
            best_mean = row.mean_r2;
            result.best_index = cell;
            result.best_params = row.params;
        }
        result.table.push_back(std::move(row));
    }
    return result;
}

namespace {

int as_int(const nlohmann::json& params, const char* key, int fallback) {
    if (!params.contains(key)) return fallback;
    return static_cast<int>(params[key].get<double>());
}

double as_double(const nlohmann::json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    return params[key].get<double>();
}

std::vector<RegressorSpec> build_registry() {
    std::vector<RegressorSpec> list;

    list.push_back({"linear", false, HyperGrid{},
                    [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const nlohmann::json&,
                       std::uint64_t) { return fit_linear(X, y); }});

    list.push_back({"lasso", false, HyperGrid{{{"alpha", {0.001, 0.01, 0.1, 1, 10}}}},
                    [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const nlohmann::json& p,
                       std::uint64_t) { return fit_lasso(X, y, as_double(p, "alpha", 1.0)); }});

    list.push_back({"knn", false,
                    HyperGrid{{{"n_neighbors", {3, 5, 7, 9, 11, 17, 19, 23, 29, 31}}}},
                    [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const nlohmann::json& p,
                       std::uint64_t) {
                        const int k = std::min<int>(as_int(p, "n_neighbors", 5),
                                                    static_cast<int>(X.rows()));
                        return fit_knn(X, y, k);
                    }});

    list.push_back({"tree", false,
                    HyperGrid{{{"max_depth", {5, 10, 15}}, {"max_leaf_nodes", {5, 10, 15}}}},
                    [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const nlohmann::json& p,
                       std::uint64_t) {
                        TreeOptions options;
                        options.max_depth = as_int(p, "max_depth", 10);
                        options.max_leaf_nodes = as_int(p, "max_leaf_nodes", 10);
                        return fit_tree(X, y, options);
                    }});

    list.push_back({"forest", true,
                    HyperGrid{{{"n_estimators", {100, 200, 300}},
                               {"min_samples_split", {0.01, 0.05, 0.1}}}},
                    [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const nlohmann::json& p,
                       std::uint64_t seed) {
                        ForestOptions options;
                        options.n_estimators = as_int(p, "n_estimators", 100);
                        options.min_samples_split = as_double(p, "min_samples_split", 0.01);
                        return fit_forest(X, y, options, seed);
                    }});

    list.push_back({"itea", true,
                    HyperGrid{{{"popsize", {100, 250, 500}}, {"gens", {100, 250, 500}}}},
                    [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const nlohmann::json& p,
                       std::uint64_t seed) {
                        IteaOptions options;
                        options.popsize = as_int(p, "popsize", 100);
                        options.generations = as_int(p, "gens", 100);
                        return fit_itea(X, y, options, seed);
                    }});

    list.push_back({"gpnls", true,
                    HyperGrid{{{"population_size", {100, 250, 500}},
                               {"generations", {100, 250, 500}}}},
                    [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const nlohmann::json& p,
                       std::uint64_t seed) {
                        GpnlsOptions options;
                        options.population_size = as_int(p, "population_size", 100);
                        options.generations = as_int(p, "generations", 100);
                        return fit_gpnls(X, y, options, seed);
                    }});

    return list;
}

}  // namespace

const std::vector<RegressorSpec>& regressor_registry() {
    static const std::vector<RegressorSpec> list = build_registry();
    return list;
}

const RegressorSpec& find_regressor(std::string_view id) {
    for (const auto& spec : regressor_registry()) {
        if (spec.id == id) return spec;
    }
    throw Error("unknown regressor '" + std::string(id) + "'");
}

}  // namespace xsr::regress
