#include "xsr/regress/model.hpp"

#include <cmath>

#include "xsr/expr/eval.hpp"
#include "xsr/expr/parse.hpp"

namespace xsr::regress {

namespace {

class TreePredictor final : public Predictor {
public:
    explicit TreePredictor(expr::ExprTree tree) : tree_(std::move(tree)) {}

    double predict_one(std::span<const double> x) const override {
        return expr::evaluate(tree_, x);
    }

    nlohmann::json structure_json() const override {
        return {{"expression", expr::format_prefix(tree_)}};
    }

private:
    expr::ExprTree tree_;
};

}  // namespace

FittedModel::FittedModel(std::string kind, std::shared_ptr<const Predictor> predictor,
                         std::optional<expr::ExprTree> form,
                         std::optional<std::vector<bool>> selected, ModelInfo info)
    : kind_(std::move(kind)),
      predictor_(std::move(predictor)),
      form_(std::move(form)),
      selected_(std::move(selected)),
      info_(std::move(info)),
      clamps_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

FittedModel FittedModel::from_tree(const expr::ExprTree& tree, std::string kind, int dimension) {
    if (tree.parameter_count() > 0) {
        throw ContractError("model trees must be parameter-free; substitute parameters first");
    }
    ModelInfo info;
    info.hyper_params = nlohmann::json::object();
    return FittedModel(std::move(kind), std::make_shared<TreePredictor>(tree), tree,
                       variables_mask(tree, dimension), std::move(info));
}

double FittedModel::predict(std::span<const double> x) const {
    if (!predictor_) throw ContractError("predict on an unfitted model");
    const double raw = predictor_->predict_one(x);
    if (std::isfinite(raw)) return raw;
    clamps_->fetch_add(1, std::memory_order_relaxed);
    if (std::isnan(raw)) return kPredictionSentinel;
    return raw > 0 ? kPredictionSentinel : -kPredictionSentinel;
}

double FittedModel::predict(const Eigen::VectorXd& x) const {
    return predict(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Eigen::VectorXd FittedModel::predict_batch(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    Eigen::VectorXd row(X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        row = X.row(i);
        out[i] = predict(row);
    }
    return out;
}

nlohmann::json FittedModel::to_json() const {
    nlohmann::json doc;
    doc["kind"] = kind_;
    doc["hyper_params"] = info_.hyper_params;
    doc["seed"] = info_.seed;
    doc["fit_seconds"] = info_.fit_seconds;
    doc["flagged"] = info_.flagged;
    if (info_.flagged) doc["flag_reason"] = info_.flag_reason;
    if (form_) doc["symbolic_form"] = expr::format_prefix(*form_);
    if (selected_) doc["selected_features"] = *selected_;
    if (predictor_) doc["structure"] = predictor_->structure_json();
    return doc;
}

std::vector<bool> variables_mask(const expr::ExprTree& tree, int dimension) {
    std::vector<bool> mask(static_cast<std::size_t>(dimension), false);
    for (const int v : tree.variables_used()) {
        if (v < dimension) mask[static_cast<std::size_t>(v)] = true;
    }
    return mask;
}

FittedModel make_symbolic_model(std::string kind, const expr::ExprTree& form, int dimension,
                                ModelInfo info) {
    if (form.parameter_count() > 0) {
        throw ContractError("model trees must be parameter-free; substitute parameters first");
    }
    return FittedModel(std::move(kind), std::make_shared<TreePredictor>(form), form,
                       variables_mask(form, dimension), std::move(info));
}

}  // namespace xsr::regress
