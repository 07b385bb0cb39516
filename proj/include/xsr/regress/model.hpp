#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "xsr/expr/node.hpp"

namespace xsr::regress {

inline constexpr double kPredictionSentinel = 1e15;

// Polymorphic prediction core. Implementations are immutable after fit.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual double predict_one(std::span<const double> x) const = 0;
    virtual nlohmann::json structure_json() const = 0;
};

struct ModelInfo {
    nlohmann::json hyper_params;
    std::uint64_t seed = 0;
    double fit_seconds = 0.0;
    bool flagged = false;       // degraded path taken during fit
    std::string flag_reason;
};

// Immutable fitted model: a prediction function, an optional symbolic form
// (parameter-free expression tree), and an optional selected-features mask.
// Non-finite raw predictions are clamped to +/- kPredictionSentinel and
// counted; predict() is total on finite inputs.
class FittedModel {
public:
    FittedModel() = default;
    FittedModel(std::string kind, std::shared_ptr<const Predictor> predictor,
                std::optional<expr::ExprTree> form, std::optional<std::vector<bool>> selected,
                ModelInfo info);

    static FittedModel from_tree(const expr::ExprTree& tree, std::string kind, int dimension);

    double predict(std::span<const double> x) const;
    double predict(const Eigen::VectorXd& x) const;
    Eigen::VectorXd predict_batch(const Eigen::MatrixXd& X) const;

    const std::string& kind() const { return kind_; }
    const std::optional<expr::ExprTree>& symbolic_form() const { return form_; }
    const std::optional<std::vector<bool>>& selected_features() const { return selected_; }
    const ModelInfo& info() const { return info_; }
    std::uint64_t clamp_count() const { return clamps_ ? clamps_->load() : 0; }

    nlohmann::json to_json() const;

private:
    std::string kind_;
    std::shared_ptr<const Predictor> predictor_;
    std::optional<expr::ExprTree> form_;
    std::optional<std::vector<bool>> selected_;
    ModelInfo info_;
    std::shared_ptr<std::atomic<std::uint64_t>> clamps_;
};

// Mask of variables that occur in the tree, over `dimension` features.
std::vector<bool> variables_mask(const expr::ExprTree& tree, int dimension);

// Model whose prediction is tree evaluation of `form`; the symbolic form and
// the predict path are identical by construction.
FittedModel make_symbolic_model(std::string kind, const expr::ExprTree& form, int dimension,
                                ModelInfo info);

}  // namespace xsr::regress
