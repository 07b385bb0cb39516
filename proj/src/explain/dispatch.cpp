#include "xsr/explain/dispatch.hpp"

namespace xsr::explain {

const std::vector<ExplainerSpec>& explainer_registry() {
    static const std::vector<ExplainerSpec> list = {
        {"permutation", false, true, false, false},
        {"shap", true, true, false, false},
        {"sage", false, true, false, false},
        {"lime", true, false, false, false},
        {"ela", true, false, false, true},
        {"morris", false, true, false, false},
        {"ig", true, false, false, false},
        {"pe", true, true, true, false},
        {"random", true, true, false, false},
    };
    return list;
}

const ExplainerSpec& find_explainer(std::string_view id) {
    for (const auto& spec : explainer_registry()) {
        if (spec.id == id) return spec;
    }
    throw Error("unknown explainer '" + std::string(id) + "'");
}

std::optional<std::string> incompatibility(const ExplainerSpec& spec,
                                           const regress::FittedModel& model, Scope scope) {
    if (scope == Scope::Local && !spec.local) return spec.id + " has no local scope";
    if (scope == Scope::Global && !spec.global) return spec.id + " has no global scope";
    if (spec.needs_symbolic_form && !model.symbolic_form()) {
        return spec.id + " requires a symbolic form; " + model.kind() + " has none";
    }
    if (spec.needs_feature_mask && !model.selected_features()) {
        return spec.id + " requires feature-selection info; " + model.kind() + " has none";
    }
    return std::nullopt;
}

Explanation run_explainer(const ExplainRequest& request, const regress::FittedModel& model,
                          const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const ExplainerConfig& config, std::uint64_t seed) {
    const ExplainerSpec& spec = find_explainer(request.id);
    if (const auto reason = incompatibility(spec, model, request.scope)) {
        throw UnsupportedExplainer(*reason);
    }
    if (request.scope == Scope::Local && !request.point) {
        throw ContractError("local explanation requires a point");
    }

    const int d = static_cast<int>(X.cols());
    Explanation explanation;
    if (request.scope == Scope::Local) {
        const Eigen::VectorXd& x = *request.point;
        if (request.id == "shap") {
            explanation = shap_local(model, X, x, config, seed);
        } else if (request.id == "lime") {
            explanation = lime_local(model, X, x, config, seed);
        } else if (request.id == "ela") {
            explanation = ela_local(model, X, x, config.ela_neighbors);
        } else if (request.id == "ig") {
            explanation = ig_local(model, X, x, config);
        } else if (request.id == "pe") {
            explanation = pe_local(model, x);
        } else if (request.id == "random") {
            explanation = random_local(x, d, seed);
        }
    } else {
        if (request.id == "permutation") {
            explanation = permutation_global(model, X, y, config.permutation_repeats, seed);
        } else if (request.id == "shap") {
            explanation = shap_global(model, X, config, seed);
        } else if (request.id == "sage") {
            explanation = sage_global(model, X, y, config, seed);
        } else if (request.id == "morris") {
            explanation = morris_global(model, X, config, seed);
        } else if (request.id == "pe") {
            explanation = pe_global(model, X, config);
        } else if (request.id == "random") {
            explanation = random_global(d, seed);
        }
    }
    explanation.model = model.kind();
    return explanation;
}

}  // namespace xsr::explain
