#include <algorithm>
#include <chrono>

#include "xsr/regress/trainers.hpp"

namespace xsr::regress {

namespace {

class KnnPredictor final : public Predictor {
public:
    KnnPredictor(Eigen::MatrixXd X, Eigen::VectorXd y, int k)
        : X_(std::move(X)), y_(std::move(y)), k_(k) {}

    double predict_one(std::span<const double> x) const override {
        const Eigen::Index n = X_.rows();
        std::vector<std::pair<double, Eigen::Index>> distances;
        distances.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            double squared = 0.0;
            for (Eigen::Index j = 0; j < X_.cols(); ++j) {
                const double diff = X_(i, j) - x[static_cast<std::size_t>(j)];
                squared += diff * diff;
            }
            distances.emplace_back(squared, i);
        }
        // Ties broken by row index: pairs compare (distance, index).
        std::partial_sort(distances.begin(), distances.begin() + k_, distances.end());
        double acc = 0.0;
        for (int i = 0; i < k_; ++i) acc += y_[distances[static_cast<std::size_t>(i)].second];
        return acc / k_;
    }

    nlohmann::json structure_json() const override {
        nlohmann::json doc;
        doc["k"] = k_;
        doc["train_rows"] = X_.rows();
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(X_.rows()));
        for (Eigen::Index i = 0; i < X_.rows(); ++i) {
            rows[static_cast<std::size_t>(i)].assign(X_.row(i).begin(), X_.row(i).end());
        }
        doc["X"] = rows;
        doc["y"] = std::vector<double>(y_.begin(), y_.end());
        return doc;
    }

private:
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    int k_;
};

}  // namespace

FittedModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k) {
    if (k < 1 || k > X.rows()) throw ContractError("knn requires 1 <= k <= n");
    const auto start = std::chrono::steady_clock::now();
    ModelInfo info;
    info.hyper_params = {{"n_neighbors", k}};
    info.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return FittedModel("knn", std::make_shared<KnnPredictor>(X, y, k), std::nullopt, std::nullopt,
                       std::move(info));
}

}  // namespace xsr::regress
