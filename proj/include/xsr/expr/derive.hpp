#pragma once

#include "xsr/expr/node.hpp"

namespace xsr::expr {

// Differentiation target: either an input variable or a free parameter slot.
struct DiffVar {
    enum class Kind { Variable, Parameter };
    Kind kind;
    int index;
};

inline DiffVar wrt_variable(int index) { return {DiffVar::Kind::Variable, index}; }
inline DiffVar wrt_parameter(int index) { return {DiffVar::Kind::Parameter, index}; }

// Symbolic derivative. The result evaluates to d(tree)/d(wrt) wherever both
// are finite. The returned tree is lightly simplified.
ExprTree differentiate(const ExprTree& tree, DiffVar wrt);

inline ExprTree differentiate(const ExprTree& tree, int variable_index) {
    return differentiate(tree, wrt_variable(variable_index));
}

}  // namespace xsr::expr
