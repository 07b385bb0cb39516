#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

#include "xsr/common/rng.hpp"
#include "xsr/explain/explainers.hpp"
#include "xsr/metrics/accuracy.hpp"

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

// Shapley kernel weight s!(d-s-1)!/d! expressed as 1/(d * C(d-1, s)).
double shapley_weight(int d, int s) {
    double binomial = 1.0;
    for (int i = 1; i <= s; ++i) {
        binomial *= static_cast<double>(d - i) / static_cast<double>(i);
    }
    return 1.0 / (static_cast<double>(d) * binomial);
}

// Exact Shapley aggregation of a coalition value function v: mask -> double.
template <typename ValueFn>
Eigen::VectorXd exact_shapley(int d, ValueFn&& value_of) {
    std::vector<double> values(std::size_t{1} << d);
    for (std::uint32_t mask = 0; mask < values.size(); ++mask) {
        values[mask] = value_of(mask);
    }
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
    std::vector<double> weights(static_cast<std::size_t>(d));
    for (int s = 0; s < d; ++s) weights[static_cast<std::size_t>(s)] = shapley_weight(d, s);
    for (std::uint32_t mask = 0; mask < values.size(); ++mask) {
        const int s = static_cast<int>(std::popcount(mask));
        for (int j = 0; j < d; ++j) {
            if (mask & (1u << j)) continue;
            phi[j] += weights[static_cast<std::size_t>(s)] * (values[mask | (1u << j)] - values[mask]);
        }
    }
    return phi;
}

// Permutation-sampling Shapley estimate for dimensions past the exact cutoff.
template <typename ValueFn>
Eigen::VectorXd sampled_shapley(int d, int samples, std::uint64_t seed, ValueFn&& value_of) {
    Rng rng(mix_seed(seed));
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
    for (int m = 0; m < samples; ++m) {
        const std::vector<int> order = rng.permutation(d);
        std::uint32_t mask = 0;
        double previous = value_of(mask);
        for (const int j : order) {
            mask |= (1u << j);
            const double current = value_of(mask);
            phi[j] += current - previous;
            previous = current;
        }
    }
    return phi / static_cast<double>(samples);
}

// Interventional removal: features outside the coalition take their training
// mean.
Eigen::VectorXd imputed_point(const Eigen::VectorXd& x, const Eigen::VectorXd& means,
                              std::uint32_t mask) {
    Eigen::VectorXd z = means;
    for (int j = 0; j < x.size(); ++j) {
        if (mask & (1u << j)) z[j] = x[j];
    }
    return z;
}

Eigen::VectorXd shap_values_at(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& x, const ExplainerConfig& config,
                               std::uint64_t seed) {
    const int d = static_cast<int>(X.cols());
    const Eigen::VectorXd means = X.colwise().mean();
    auto value_of = [&](std::uint32_t mask) { return model.predict(imputed_point(x, means, mask)); };
    if (d <= config.shap_exact_cutoff) {
        return exact_shapley(d, value_of);
    }
    return sampled_shapley(d, config.shap_samples, seed, value_of);
}

std::vector<Eigen::Index> global_row_selection(Eigen::Index n, int cap, std::uint64_t seed) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    if (cap > 0 && cap < n) {
        Rng rng(mix_seed(seed));
        std::vector<int> permutation = rng.permutation(static_cast<int>(n));
        rows.assign(permutation.begin(), permutation.begin() + cap);
        std::sort(rows.begin(), rows.end());
    }
    return rows;
}

// 16x16 equal-width histogram estimate of I(a; b) in nats.
double mutual_information(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    constexpr int kBins = 16;
    const Eigen::Index n = a.size();
    const double a_lo = a.minCoeff(), a_hi = a.maxCoeff();
    const double b_lo = b.minCoeff(), b_hi = b.maxCoeff();
    const double a_width = a_hi > a_lo ? (a_hi - a_lo) / kBins : 1.0;
    const double b_width = b_hi > b_lo ? (b_hi - b_lo) / kBins : 1.0;

    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(kBins, kBins);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int ai = std::min(kBins - 1, static_cast<int>((a[i] - a_lo) / a_width));
        const int bi = std::min(kBins - 1, static_cast<int>((b[i] - b_lo) / b_width));
        joint(ai, bi) += 1.0;
    }
    joint /= static_cast<double>(n);
    const Eigen::VectorXd pa = joint.rowwise().sum();
    const Eigen::VectorXd pb = joint.colwise().sum();

    double info = 0.0;
    for (int i = 0; i < kBins; ++i) {
        for (int j = 0; j < kBins; ++j) {
            const double pij = joint(i, j);
            if (pij > 0.0) info += pij * std::log(pij / (pa[i] * pb[j]));
        }
    }
    return info;
}

}  // namespace

Explanation permutation_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, int repeats, std::uint64_t seed) {
    if (repeats < 1) throw ContractError("permutation importance requires K >= 1");
    const Stopwatch watch;
    const int d = static_cast<int>(X.cols());
    const Eigen::Index n = X.rows();
    const double baseline = metrics::r2(model.predict_batch(X), y).value;

    Rng rng(mix_seed(seed));
    Explanation explanation;
    explanation.values.resize(d);
    Eigen::MatrixXd shuffled = X;
    for (int j = 0; j < d; ++j) {
        double mean_r2 = 0.0;
        for (int k = 0; k < repeats; ++k) {
            const std::vector<int> order = rng.permutation(static_cast<int>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                shuffled(i, j) = X(order[static_cast<std::size_t>(i)], j);
            }
            mean_r2 += metrics::r2(model.predict_batch(shuffled), y).value;
        }
        shuffled.col(j) = X.col(j);
        explanation.values[j] = baseline - mean_r2 / repeats;
    }

    explanation.scope = Scope::Global;
    explanation.explainer = "permutation";
    explanation.model = model.kind();
    explanation.meta = {{"repeats", repeats}, {"baseline_r2", baseline}};
    explanation.seconds = watch.seconds();
    return explanation;
}

Explanation shap_local(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& x, const ExplainerConfig& config,
                       std::uint64_t seed) {
    config.validate();
    const Stopwatch watch;
    Explanation explanation;
    explanation.values = shap_values_at(model, X, x, config, seed);
    explanation.scope = Scope::Local;
    explanation.reference = x;
    explanation.explainer = "shap";
    explanation.model = model.kind();
    explanation.meta = {{"exact", static_cast<int>(X.cols()) <= config.shap_exact_cutoff}};
    explanation.seconds = watch.seconds();
    return explanation;
}

Explanation shap_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                        const ExplainerConfig& config, std::uint64_t seed) {
    config.validate();
    const Stopwatch watch;
    const int d = static_cast<int>(X.cols());
    const std::vector<Eigen::Index> rows =
        global_row_selection(X.rows(), config.global_rows, derive_seed(seed, std::string_view("rows")));

    Eigen::VectorXd accumulated = Eigen::VectorXd::Zero(d);
    for (const Eigen::Index i : rows) {
        const Eigen::VectorXd local = shap_values_at(
            model, X, X.row(i).transpose(), config,
            derive_seed(seed, std::string_view("row"), static_cast<std::uint64_t>(i)));
        accumulated += local.cwiseAbs();
    }

    Explanation explanation;
    explanation.values = accumulated / static_cast<double>(rows.size());
    explanation.scope = Scope::Global;
    explanation.explainer = "shap";
    explanation.model = model.kind();
    explanation.meta = {{"rows_used", rows.size()},
                        {"exact", d <= config.shap_exact_cutoff}};
    explanation.seconds = watch.seconds();
    return explanation;
}

Explanation sage_global(const regress::FittedModel& model, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& y, const ExplainerConfig& config,
                        std::uint64_t seed) {
    config.validate();
    const Stopwatch watch;
    const int d = static_cast<int>(X.cols());
    const std::vector<Eigen::Index> rows =
        global_row_selection(X.rows(), config.sage_rows, derive_seed(seed, std::string_view("rows")));

    Eigen::MatrixXd Xs(static_cast<Eigen::Index>(rows.size()), d);
    Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Xs.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
        ys[static_cast<Eigen::Index>(i)] = y[rows[i]];
    }
    const Eigen::VectorXd means = X.colwise().mean();

    // Predictive power of a coalition: histogram mutual information between
    // the mean-imputed predictions and the targets.
    auto information_of = [&](std::uint32_t mask) {
        Eigen::MatrixXd imputed = Xs;
        for (int j = 0; j < d; ++j) {
            if (!(mask & (1u << j))) imputed.col(j).setConstant(means[j]);
        }
        return mutual_information(model.predict_batch(imputed), ys);
    };
    // Printed formulation: v(S) = I(no-feature predictor) - I(S-restricted
    // predictor). The no-feature term is identically zero, so v(S) = -I(S).
    auto printed_value = [&](std::uint32_t mask) { return -information_of(mask); };

    Eigen::VectorXd printed;
    if (d <= config.shap_exact_cutoff) {
        printed = exact_shapley(d, printed_value);
    } else {
        printed = sampled_shapley(d, config.shap_samples, seed, printed_value);
    }

    Explanation explanation;
    // Reported values carry the uncertainty-reduction sign (positive for
    // informative features); the printed-formula sign is kept alongside.
    explanation.values = -printed;
    explanation.scope = Scope::Global;
    explanation.explainer = "sage";
    explanation.model = model.kind();
    explanation.meta = {{"rows_used", rows.size()},
                        {"exact", d <= config.shap_exact_cutoff},
                        {"printed_sign_values",
                         std::vector<double>(printed.begin(), printed.end())}};
    explanation.seconds = watch.seconds();
    return explanation;
}

}  // namespace xsr::explain
