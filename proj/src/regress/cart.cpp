#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>

#include "xsr/common/rng.hpp"
#include "xsr/regress/trainers.hpp"

namespace xsr::regress {

namespace {

struct CartNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct SplitChoice {
    bool valid = false;
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

struct BuildOptions {
    int max_depth = INT_MAX;
    int max_leaf_nodes = INT_MAX;
    int min_samples_split = 2;
    int features_per_split = 0;  // 0 or == d means all features
};

double sse_of(const Eigen::VectorXd& y, const std::vector<int>& rows) {
    double sum = 0.0, sum_sq = 0.0;
    for (const int i : rows) {
        sum += y[i];
        sum_sq += y[i] * y[i];
    }
    return sum_sq - sum * sum / static_cast<double>(rows.size());
}

double mean_of(const Eigen::VectorXd& y, const std::vector<int>& rows) {
    double sum = 0.0;
    for (const int i : rows) sum += y[i];
    return sum / static_cast<double>(rows.size());
}

// Exhaustive variance-reduction scan over candidate features. Thresholds are
// midpoints between distinct consecutive values; ties resolved toward the
// earlier feature and the lower threshold.
SplitChoice best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const std::vector<int>& rows, const std::vector<int>& features,
                       double node_sse) {
    SplitChoice best;
    const auto n = rows.size();
    std::vector<std::pair<double, double>> points(n);  // (x, y) sorted per feature
    for (const int j : features) {
        for (std::size_t i = 0; i < n; ++i) {
            points[i] = {X(rows[i], j), y[rows[i]]};
        }
        std::sort(points.begin(), points.end());
        double left_sum = 0.0, left_sq = 0.0;
        double total_sum = 0.0, total_sq = 0.0;
        for (const auto& [xv, yv] : points) {
            total_sum += yv;
            total_sq += yv * yv;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += points[i].second;
            left_sq += points[i].second * points[i].second;
            if (points[i].first == points[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            const double sse_left = left_sq - left_sum * left_sum / nl;
            const double sse_right = (total_sq - left_sq) -
                                     (total_sum - left_sum) * (total_sum - left_sum) / nr;
            const double decrease = node_sse - sse_left - sse_right;
            if (decrease > best.decrease) {
                best.valid = true;
                best.feature = j;
                best.threshold = 0.5 * (points[i].first + points[i + 1].first);
                best.decrease = decrease;
            }
        }
    }
    return best;
}

struct Candidate {
    int node_index;
    std::vector<int> rows;
    int depth;
    double sse;
    SplitChoice split;
    long long order;  // insertion id, for deterministic pops among equal gains
};

struct CandidateCompare {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.split.decrease != b.split.decrease) return a.split.decrease < b.split.decrease;
        return a.order > b.order;
    }
};

std::vector<CartNode> build_cart(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 std::vector<int> rows, const BuildOptions& options, Rng* rng) {
    const int d = static_cast<int>(X.cols());
    const int subset_size =
        options.features_per_split > 0 ? std::min(options.features_per_split, d) : d;

    auto pick_features = [&]() {
        std::vector<int> features(static_cast<std::size_t>(d));
        std::iota(features.begin(), features.end(), 0);
        if (rng != nullptr && subset_size < d) {
            for (int i = 0; i < subset_size; ++i) {
                std::swap(features[static_cast<std::size_t>(i)],
                          features[static_cast<std::size_t>(i + rng->index(d - i))]);
            }
            features.resize(static_cast<std::size_t>(subset_size));
            std::sort(features.begin(), features.end());
        }
        return features;
    };

    std::vector<CartNode> nodes;
    nodes.emplace_back();
    nodes[0].value = mean_of(y, rows);

    std::priority_queue<Candidate, std::vector<Candidate>, CandidateCompare> queue;
    long long order = 0;

    auto consider = [&](int node_index, std::vector<int>&& node_rows, int depth) {
        const double sse = sse_of(y, node_rows);
        if (depth >= options.max_depth || static_cast<int>(node_rows.size()) < options.min_samples_split ||
            sse <= 1e-12) {
            return;
        }
        SplitChoice split = best_split(X, y, node_rows, pick_features(), sse);
        if (!split.valid) return;
        queue.push({node_index, std::move(node_rows), depth, sse, split, order++});
    };

    consider(0, std::move(rows), 1);
    int leaves = 1;
    while (!queue.empty() && leaves < options.max_leaf_nodes) {
        Candidate top = queue.top();
        queue.pop();

        std::vector<int> left_rows, right_rows;
        for (const int i : top.rows) {
            (X(i, top.split.feature) <= top.split.threshold ? left_rows : right_rows).push_back(i);
        }
        CartNode& node = nodes[static_cast<std::size_t>(top.node_index)];
        node.feature = top.split.feature;
        node.threshold = top.split.threshold;
        node.left = static_cast<int>(nodes.size());
        node.right = static_cast<int>(nodes.size()) + 1;
        nodes.emplace_back();
        nodes.back().value = mean_of(y, left_rows);
        nodes.emplace_back();
        nodes.back().value = mean_of(y, right_rows);
        ++leaves;

        consider(nodes[static_cast<std::size_t>(top.node_index)].left, std::move(left_rows), top.depth + 1);
        consider(nodes[static_cast<std::size_t>(top.node_index)].right, std::move(right_rows), top.depth + 1);
    }
    return nodes;
}

double predict_cart(const std::vector<CartNode>& nodes, std::span<const double> x) {
    int index = 0;
    while (nodes[static_cast<std::size_t>(index)].feature >= 0) {
        const CartNode& node = nodes[static_cast<std::size_t>(index)];
        index = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(index)].value;
}

nlohmann::json cart_json(const std::vector<CartNode>& nodes) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& node : nodes) {
        list.push_back({{"feature", node.feature},
                        {"threshold", node.threshold},
                        {"left", node.left},
                        {"right", node.right},
                        {"value", node.value}});
    }
    return list;
}

int cart_depth(const std::vector<CartNode>& nodes, int index = 0) {
    const CartNode& node = nodes[static_cast<std::size_t>(index)];
    if (node.feature < 0) return 1;
    return 1 + std::max(cart_depth(nodes, node.left), cart_depth(nodes, node.right));
}

class CartPredictor final : public Predictor {
public:
    explicit CartPredictor(std::vector<CartNode> nodes) : nodes_(std::move(nodes)) {}

    double predict_one(std::span<const double> x) const override { return predict_cart(nodes_, x); }

    nlohmann::json structure_json() const override {
        return {{"nodes", cart_json(nodes_)}, {"depth", cart_depth(nodes_)}};
    }

private:
    std::vector<CartNode> nodes_;
};

class ForestPredictor final : public Predictor {
public:
    explicit ForestPredictor(std::vector<std::vector<CartNode>> trees) : trees_(std::move(trees)) {}

    double predict_one(std::span<const double> x) const override {
        double acc = 0.0;
        for (const auto& tree : trees_) acc += predict_cart(tree, x);
        return acc / static_cast<double>(trees_.size());
    }

    nlohmann::json structure_json() const override {
        nlohmann::json members = nlohmann::json::array();
        for (const auto& tree : trees_) members.push_back(cart_json(tree));
        return {{"trees", members}};
    }

private:
    std::vector<std::vector<CartNode>> trees_;
};

}  // namespace

FittedModel fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> rows(static_cast<std::size_t>(X.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    BuildOptions build{options.max_depth, options.max_leaf_nodes, options.min_samples_split, 0};
    auto nodes = build_cart(X, y, std::move(rows), build, nullptr);

    ModelInfo info;
    info.hyper_params = {{"max_depth", options.max_depth}, {"max_leaf_nodes", options.max_leaf_nodes}};
    info.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return FittedModel("tree", std::make_shared<CartPredictor>(std::move(nodes)), std::nullopt,
                       std::nullopt, std::move(info));
}

FittedModel fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ForestOptions& options, std::uint64_t seed) {
    if (options.n_estimators < 1) throw ContractError("forest requires n_estimators >= 1");
    const auto start = std::chrono::steady_clock::now();
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    const int min_split = std::max(2, static_cast<int>(std::ceil(options.min_samples_split * n)));
    const int features_per_split = (d + 2) / 3;  // ceil(d/3)

    BuildOptions build{options.max_depth, options.max_leaf_nodes, min_split, features_per_split};
    std::vector<std::vector<CartNode>> trees;
    trees.reserve(static_cast<std::size_t>(options.n_estimators));
    for (int t = 0; t < options.n_estimators; ++t) {
        Rng rng(derive_seed(seed, std::string_view("forest-tree"), static_cast<std::uint64_t>(t)));
        std::vector<int> rows(static_cast<std::size_t>(n));
        if (options.bootstrap) {
            for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = rng.index(n);
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        trees.push_back(build_cart(X, y, std::move(rows), build, &rng));
    }

    ModelInfo info;
    info.hyper_params = {{"n_estimators", options.n_estimators},
                         {"min_samples_split", options.min_samples_split},
                         {"bootstrap", options.bootstrap}};
    info.seed = seed;
    info.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return FittedModel("forest", std::make_shared<ForestPredictor>(std::move(trees)), std::nullopt,
                       std::nullopt, std::move(info));
}

}  // namespace xsr::regress
