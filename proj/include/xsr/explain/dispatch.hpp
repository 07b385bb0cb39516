#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xsr/explain/explainers.hpp"

namespace xsr::explain {

struct ExplainerSpec {
    std::string id;
    bool local = false;
    bool global = false;
    bool needs_symbolic_form = false;   // model-specific methods
    bool needs_feature_mask = false;    // ELA's masked neighbor distance
};

const std::vector<ExplainerSpec>& explainer_registry();
const ExplainerSpec& find_explainer(std::string_view id);

// Empty when the pair is runnable, otherwise the skip reason.
std::optional<std::string> incompatibility(const ExplainerSpec& spec, const regress::FittedModel& model,
                                           Scope scope);

struct ExplainRequest {
    std::string id;
    Scope scope = Scope::Global;
    std::optional<Eigen::VectorXd> point;  // required for local scope
};

// Uniform entry point used by the harness for fitted models and ground-truth
// models alike; throws UnsupportedExplainer on incompatible pairs.
Explanation run_explainer(const ExplainRequest& request, const regress::FittedModel& model,
                          const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const ExplainerConfig& config, std::uint64_t seed);

}  // namespace xsr::explain
