#include "xsr/explain/explainers.hpp"

#include "xsr/common/rng.hpp"

namespace xsr::explain {

void ExplainerConfig::validate() const {
    if (permutation_repeats < 1 || shap_samples < 1 || lime_samples < 1 || ela_neighbors < 1 ||
        morris_trajectories < 1 || morris_levels < 2 || ig_steps < 2) {
        throw ContractError("explainer configuration counts must be positive");
    }
    if (shap_exact_cutoff < 1 || shap_exact_cutoff > 20) {
        throw ContractError("shap exact-enumeration cutoff must lie in [1, 20]");
    }
}

Explanation random_local(const Eigen::VectorXd& x, int dimension, std::uint64_t seed) {
    Explanation explanation = random_global(dimension, seed);
    explanation.scope = Scope::Local;
    explanation.reference = x;
    return explanation;
}

Explanation random_global(int dimension, std::uint64_t seed) {
    Rng rng(mix_seed(seed));
    const std::vector<int> ranks = rng.permutation(dimension);
    Explanation explanation;
    explanation.explainer = "random";
    explanation.scope = Scope::Global;
    explanation.values.resize(dimension);
    for (int j = 0; j < dimension; ++j) {
        explanation.values[j] = static_cast<double>(ranks[static_cast<std::size_t>(j)] + 1);
    }
    return explanation;
}

}  // namespace xsr::explain
