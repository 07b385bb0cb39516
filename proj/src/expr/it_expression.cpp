#include "xsr/expr/it_expression.hpp"

#include <algorithm>

namespace xsr::expr {

void validate(const ITExpression& it) {
    const int d = it.dimension();
    for (const auto& term : it.terms) {
        if (static_cast<int>(term.strengths.size()) != d) {
            throw ContractError("IT terms must share one strength-vector length");
        }
        if (std::all_of(term.strengths.begin(), term.strengths.end(), [](int k) { return k == 0; })) {
            throw ContractError("IT term requires at least one nonzero strength");
        }
    }
    for (std::size_t i = 0; i < it.terms.size(); ++i) {
        for (std::size_t j = i + 1; j < it.terms.size(); ++j) {
            if (it.terms[i].transform == it.terms[j].transform &&
                it.terms[i].strengths == it.terms[j].strengths) {
                throw ContractError("duplicate (transform, strengths) pair in IT expression");
            }
        }
    }
}

namespace {

// prod_i x_i^k_i with positive exponents in the numerator and negative ones
// in a denominator.
NodePtr interaction(const std::vector<int>& strengths) {
    NodePtr numerator;
    NodePtr denominator;
    for (std::size_t i = 0; i < strengths.size(); ++i) {
        const int k = strengths[i];
        if (k == 0) continue;
        NodePtr part = integer_power(x(static_cast<int>(i)), std::abs(k));
        NodePtr& slot = k > 0 ? numerator : denominator;
        slot = slot ? mul(std::move(slot), std::move(part)) : std::move(part);
    }
    if (!numerator && !denominator) return c(1.0);
    if (!denominator) return numerator;
    if (!numerator) return div(c(1.0), std::move(denominator));
    return div(std::move(numerator), std::move(denominator));
}

}  // namespace

ExprTree it_to_tree(const ITExpression& it) {
    validate(it);
    NodePtr result = c(it.intercept);
    for (const auto& term : it.terms) {
        NodePtr body = interaction(term.strengths);
        if (term.transform != UnaryOp::Id) {
            body = unary(term.transform, std::move(body));
        }
        result = add(std::move(result), mul(c(term.coefficient), std::move(body)));
    }
    return ExprTree(std::move(result));
}

}  // namespace xsr::expr
