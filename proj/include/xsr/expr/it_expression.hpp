#pragma once

#include <vector>

#include "xsr/expr/node.hpp"

namespace xsr::expr {

// One interaction-transformation term: coefficient * transform(prod_i x_i^k_i).
struct ITTerm {
    UnaryOp transform = UnaryOp::Id;
    std::vector<int> strengths;  // integer exponent per feature
    double coefficient = 0.0;
};

// Affine combination of transformed monomial interactions.
struct ITExpression {
    double intercept = 0.0;
    std::vector<ITTerm> terms;

    int dimension() const { return terms.empty() ? 0 : static_cast<int>(terms[0].strengths.size()); }
};

// Throws ContractError when strength vectors are inconsistent, a term has no
// nonzero strength, or two terms share the same (transform, strengths) pair.
void validate(const ITExpression& it);

// Lowers to an expression tree; negative strengths become divisions.
ExprTree it_to_tree(const ITExpression& it);

}  // namespace xsr::expr
