#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "xsr/common/rng.hpp"
#include "xsr/expr/eval.hpp"
#include "xsr/expr/it_expression.hpp"
#include "xsr/metrics/accuracy.hpp"
#include "xsr/regress/trainers.hpp"

namespace xsr::regress {

namespace {

using expr::ITExpression;
using expr::ITTerm;
using expr::UnaryOp;

const std::vector<UnaryOp>& transforms() {
    static const std::vector<UnaryOp> set = expr::FunctionSet::it_transforms().unary;
    return set;
}

struct Individual {
    ITExpression it;
    double fitness = std::numeric_limits<double>::infinity();
};

bool all_zero(const std::vector<int>& strengths) {
    return std::all_of(strengths.begin(), strengths.end(), [](int k) { return k == 0; });
}

bool has_term(const ITExpression& it, const ITTerm& term) {
    return std::any_of(it.terms.begin(), it.terms.end(), [&](const ITTerm& t) {
        return t.transform == term.transform && t.strengths == term.strengths;
    });
}

// Negative strengths put a pole at zero, so they are only offered on
// features whose observed training range stays away from sign changes.
struct StrengthPolicy {
    int max_strength;
    std::vector<bool> allow_negative;

    int draw(Rng& rng, int feature) const {
        if (allow_negative[static_cast<std::size_t>(feature)]) {
            int k = rng.index(2 * max_strength) - max_strength;
            if (k >= 0) ++k;  // skip zero
            return k;
        }
        return 1 + rng.index(max_strength);
    }

    int draw_or_zero(Rng& rng, int feature) const {
        if (allow_negative[static_cast<std::size_t>(feature)]) {
            return rng.index(2 * max_strength + 1) - max_strength;
        }
        return rng.index(max_strength + 1);
    }

    int clamp(int feature, int k) const {
        const int lo = allow_negative[static_cast<std::size_t>(feature)] ? -max_strength : 0;
        return std::clamp(k, lo, max_strength);
    }
};

StrengthPolicy make_policy(const Eigen::MatrixXd& X, int max_strength) {
    StrengthPolicy policy{max_strength, {}};
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double lo = X.col(j).minCoeff();
        const double hi = X.col(j).maxCoeff();
        policy.allow_negative.push_back(lo > 0.0 || hi < 0.0);
    }
    return policy;
}

ITTerm random_term(Rng& rng, int d, const StrengthPolicy& policy) {
    ITTerm term;
    term.transform = transforms()[static_cast<std::size_t>(rng.index(static_cast<int>(transforms().size())))];
    term.strengths.assign(static_cast<std::size_t>(d), 0);
    // Sparse interactions: each strength is zero half the time.
    for (int j = 0; j < d; ++j) {
        if (rng.uniform01() < 0.5) continue;
        term.strengths[static_cast<std::size_t>(j)] = policy.draw(rng, j);
    }
    if (all_zero(term.strengths)) {
        const int j = rng.index(d);
        term.strengths[static_cast<std::size_t>(j)] = policy.draw(rng, j);
    }
    return term;
}

// Term matrix column g_j(prod_i x_i^k_ij) for every row of X.
Eigen::ArrayXd term_column(const ITTerm& term, const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    Eigen::ArrayXd product = Eigen::ArrayXd::Ones(n);
    for (std::size_t j = 0; j < term.strengths.size(); ++j) {
        const int k = term.strengths[j];
        if (k == 0) continue;
        const auto col = X.col(static_cast<Eigen::Index>(j)).array();
        Eigen::ArrayXd power = col;
        for (int i = 1; i < std::abs(k); ++i) power *= col;
        if (k > 0) {
            product *= power;
        } else {
            product /= power;
        }
    }
    Eigen::ArrayXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = expr::apply_unary(term.transform, product[i]);
    return out;
}

// Fits coefficients by OLS on the transformed term matrix and returns the
// training NMSE; non-finite columns or predictions yield +inf fitness.
double evaluate_individual(ITExpression& it, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           double y_variance) {
    const Eigen::Index n = X.rows();
    const auto t = static_cast<Eigen::Index>(it.terms.size());
    Eigen::MatrixXd design(n, t + 1);
    design.col(0).setOnes();
    for (Eigen::Index j = 0; j < t; ++j) {
        const Eigen::ArrayXd column = term_column(it.terms[static_cast<std::size_t>(j)], X);
        if (!column.isFinite().all()) return std::numeric_limits<double>::infinity();
        design.col(j + 1) = column.matrix();
    }

    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
    if (!beta.allFinite()) return std::numeric_limits<double>::infinity();

    const double mse = (design * beta - y).squaredNorm() / static_cast<double>(n);
    if (!std::isfinite(mse)) return std::numeric_limits<double>::infinity();

    it.intercept = beta[0];
    for (Eigen::Index j = 0; j < t; ++j) it.terms[static_cast<std::size_t>(j)].coefficient = beta[j + 1];
    return y_variance > 0 ? mse / y_variance : mse;
}

// The three ITEA mutations: expand (new random term or elementwise +/-
// combination of two existing terms), shrink (drop a random term), and local
// modification of one strength value.
ITExpression mutate(const ITExpression& parent, Rng& rng, const IteaOptions& options,
                    const StrengthPolicy& policy) {
    const int d = parent.dimension();
    ITExpression child = parent;
    const int terms = static_cast<int>(child.terms.size());

    std::vector<int> kinds;  // 0 expand-random, 1 expand-combine, 2 shrink, 3 local
    if (terms < options.max_terms) {
        kinds.push_back(0);
        if (terms >= 2) kinds.push_back(1);
    }
    if (terms > 1) kinds.push_back(2);
    kinds.push_back(3);

    switch (kinds[static_cast<std::size_t>(rng.index(static_cast<int>(kinds.size())))]) {
        case 0: {
            for (int attempt = 0; attempt < 8; ++attempt) {
                ITTerm term = random_term(rng, d, policy);
                if (!has_term(child, term)) {
                    child.terms.push_back(std::move(term));
                    break;
                }
            }
            break;
        }
        case 1: {
            const int a = rng.index(terms);
            int b = rng.index(terms - 1);
            if (b >= a) ++b;
            const int sign = rng.uniform01() < 0.5 ? 1 : -1;
            ITTerm term;
            term.transform = child.terms[static_cast<std::size_t>(a)].transform;
            term.strengths.assign(static_cast<std::size_t>(d), 0);
            for (int j = 0; j < d; ++j) {
                const int combined = child.terms[static_cast<std::size_t>(a)].strengths[static_cast<std::size_t>(j)] +
                                     sign * child.terms[static_cast<std::size_t>(b)].strengths[static_cast<std::size_t>(j)];
                term.strengths[static_cast<std::size_t>(j)] = policy.clamp(j, combined);
            }
            if (!all_zero(term.strengths) && !has_term(child, term)) {
                child.terms.push_back(std::move(term));
            }
            break;
        }
        case 2: {
            child.terms.erase(child.terms.begin() + rng.index(terms));
            break;
        }
        case 3: {
            for (int attempt = 0; attempt < 8; ++attempt) {
                ITExpression trial = child;
                const std::size_t ti = static_cast<std::size_t>(rng.index(terms));
                ITTerm& term = trial.terms[ti];
                const int feature = rng.index(d);
                term.strengths[static_cast<std::size_t>(feature)] = policy.draw_or_zero(rng, feature);
                if (all_zero(term.strengths)) continue;
                bool duplicate = false;
                for (std::size_t other = 0; other < trial.terms.size(); ++other) {
                    if (other == ti) continue;
                    if (trial.terms[other].transform == term.transform &&
                        trial.terms[other].strengths == term.strengths) {
                        duplicate = true;
                        break;
                    }
                }
                if (!duplicate) {
                    child = std::move(trial);
                    break;
                }
            }
            break;
        }
    }
    return child;
}

Individual random_individual(Rng& rng, int d, const IteaOptions& options,
                             const StrengthPolicy& policy) {
    Individual ind;
    const int terms = 1 + rng.index(options.max_initial_terms);
    for (int t = 0; t < terms && static_cast<int>(ind.it.terms.size()) < options.max_terms; ++t) {
        ITTerm term = random_term(rng, d, policy);
        if (!has_term(ind.it, term)) ind.it.terms.push_back(std::move(term));
    }
    return ind;
}

}  // namespace

FittedModel fit_itea(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const IteaOptions& options,
                     std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const int d = static_cast<int>(X.cols());
    const double y_mean = y.mean();
    const double y_variance = (y.array() - y_mean).square().sum() / static_cast<double>(y.size());

    const StrengthPolicy policy = make_policy(X, options.max_strength);
    Rng rng(mix_seed(seed));
    std::vector<Individual> population;
    population.reserve(static_cast<std::size_t>(options.popsize));
    for (int i = 0; i < options.popsize; ++i) {
        Individual ind = random_individual(rng, d, options, policy);
        ind.fitness = evaluate_individual(ind.it, X, y, y_variance);
        population.push_back(std::move(ind));
    }

    for (int generation = 0; generation < options.generations; ++generation) {
        for (auto& parent : population) {
            Individual child;
            child.it = mutate(parent.it, rng, options, policy);
            child.fitness = evaluate_individual(child.it, X, y, y_variance);
            // (mu + lambda) survival between parent and mutant.
            if (child.fitness <= parent.fitness) {
                parent = std::move(child);
            }
        }
    }

    const auto best = std::min_element(population.begin(), population.end(),
                                       [](const Individual& a, const Individual& b) {
                                           return a.fitness < b.fitness;
                                       });

    ModelInfo info;
    info.hyper_params = {{"popsize", options.popsize},
                         {"gens", options.generations},
                         {"max_terms", options.max_terms},
                         {"max_strength", options.max_strength},
                         {"selection", "mu-plus-lambda"}};
    info.seed = seed;

    if (!std::isfinite(best->fitness)) {
        // Degenerate population: every candidate evaluated non-finite.
        const FittedModel fallback = fit_linear(X, y);
        info.flagged = true;
        info.flag_reason = "degenerate population; linear fallback";
        info.fit_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return make_symbolic_model("itea", *fallback.symbolic_form(), d, std::move(info));
    }

    const expr::ExprTree form = expr::it_to_tree(best->it);
    info.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    info.hyper_params["terms"] = best->it.terms.size();
    info.hyper_params["train_nmse"] = best->fitness;
    return make_symbolic_model("itea", form, d, std::move(info));
}

}  // namespace xsr::regress
