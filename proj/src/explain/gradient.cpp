#include <chrono>
#include <cmath>

#include "xsr/explain/explainers.hpp"
#include "xsr/expr/derive.hpp"
#include "xsr/expr/eval.hpp"

namespace xsr::explain {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

// Explanations are d-vectors of finite values by contract. Symbolic
// gradients can leave the primitive domain (log, asin, sqrt) at perturbed
// points; entries are clamped to the prediction sentinel like non-finite
// model outputs.
bool clamp_non_finite(Eigen::VectorXd& values) {
    bool clamped = false;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        if (std::isfinite(values[j])) continue;
        clamped = true;
        if (std::isnan(values[j])) {
            values[j] = regress::kPredictionSentinel;
        } else {
            values[j] = values[j] > 0 ? regress::kPredictionSentinel : -regress::kPredictionSentinel;
        }
    }
    return clamped;
}

// Central difference with a coordinate-scaled step.
double numeric_partial(const regress::FittedModel& model, const Eigen::VectorXd& z, int j) {
    const double h = 1e-6 * std::max(1.0, std::abs(z[j]));
    Eigen::VectorXd forward = z, backward = z;
    forward[j] += h;
    backward[j] -= h;
    return (model.predict(forward) - model.predict(backward)) / (2.0 * h);
}

}  // namespace

Explanation ig_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& x, const ExplainerConfig& config) {
    config.validate();
    const Stopwatch watch;
    const int d = static_cast<int>(X.cols());
    const int m = config.ig_steps;

    const Eigen::VectorXd baseline =
        config.ig_zero_baseline ? Eigen::VectorXd::Zero(d).eval() : X.colwise().mean().transpose().eval();
    const Eigen::VectorXd direction = x - baseline;

    // Per-feature gradient evaluations along the straight path.
    Eigen::MatrixXd gradients(m, d);
    if (model.symbolic_form()) {
        std::vector<expr::ExprTree> partials;
        partials.reserve(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) partials.push_back(expr::differentiate(*model.symbolic_form(), j));
        Eigen::VectorXd z(d);
        for (int t = 0; t < m; ++t) {
            const double alpha = static_cast<double>(t) / (m - 1);
            z = baseline + alpha * direction;
            for (int j = 0; j < d; ++j) gradients(t, j) = expr::evaluate(partials[static_cast<std::size_t>(j)], as_span(z));
        }
    } else {
        Eigen::VectorXd z(d);
        for (int t = 0; t < m; ++t) {
            const double alpha = static_cast<double>(t) / (m - 1);
            z = baseline + alpha * direction;
            for (int j = 0; j < d; ++j) gradients(t, j) = numeric_partial(model, z, j);
        }
    }

    Explanation explanation;
    explanation.values.resize(d);
    for (int j = 0; j < d; ++j) {
        double integral = 0.0;
        for (int t = 0; t + 1 < m; ++t) {
            integral += 0.5 * (gradients(t, j) + gradients(t + 1, j));
        }
        integral /= static_cast<double>(m - 1);
        explanation.values[j] = direction[j] * integral;
    }

    const bool clamped = clamp_non_finite(explanation.values);
    explanation.scope = Scope::Local;
    explanation.reference = x;
    explanation.explainer = "ig";
    explanation.model = model.kind();
    explanation.meta = {{"steps", m},
                        {"baseline", config.ig_zero_baseline ? "zero" : "train-mean"},
                        {"analytic_gradients", model.symbolic_form().has_value()},
                        {"clamped", clamped}};
    explanation.seconds = watch.seconds();
    return explanation;
}

Explanation pe_local(const regress::FittedModel& model, const Eigen::VectorXd& x) {
    const Stopwatch watch;
    if (!model.symbolic_form()) {
        throw UnsupportedExplainer("partial effects require a model with a symbolic form");
    }
    const int d = static_cast<int>(x.size());
    Explanation explanation;
    explanation.values.resize(d);
    for (int j = 0; j < d; ++j) {
        explanation.values[j] = expr::evaluate(expr::differentiate(*model.symbolic_form(), j), as_span(x));
    }
    const bool clamped = clamp_non_finite(explanation.values);
    explanation.scope = Scope::Local;
    explanation.reference = x;
    explanation.explainer = "pe";
    explanation.model = model.kind();
    explanation.meta = {{"clamped", clamped}};
    explanation.seconds = watch.seconds();
    return explanation;
}

Explanation pe_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                      const ExplainerConfig& config) {
    config.validate();
    const Stopwatch watch;
    if (!model.symbolic_form()) {
        throw UnsupportedExplainer("partial effects require a model with a symbolic form");
    }
    const int d = static_cast<int>(X.cols());

    Eigen::MatrixXd rows = X;
    if (config.global_rows > 0 && config.global_rows < X.rows()) {
        rows = X.topRows(config.global_rows);
    }

    Explanation explanation;
    explanation.values.resize(d);
    for (int j = 0; j < d; ++j) {
        const expr::ExprTree partial = expr::differentiate(*model.symbolic_form(), j);
        explanation.values[j] = expr::evaluate_batch(partial, rows).cwiseAbs().mean();
    }
    const bool clamped = clamp_non_finite(explanation.values);
    explanation.scope = Scope::Global;
    explanation.explainer = "pe";
    explanation.model = model.kind();
    explanation.meta = {{"rows_used", rows.rows()}, {"clamped", clamped}};
    explanation.seconds = watch.seconds();
    return explanation;
}

}  // namespace xsr::explain
