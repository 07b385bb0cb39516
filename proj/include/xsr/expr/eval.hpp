#pragma once

#include <span>

#include <Eigen/Core>

#include "xsr/expr/node.hpp"

namespace xsr::expr {

// Evaluates the tree at a single observation. Out-of-domain primitive inputs
// (log of a negative, asin outside [-1,1], division by zero) follow IEEE
// semantics and propagate as non-finite values. Index-out-of-range is a
// contract violation and throws; it is never mapped to a non-finite result.
double evaluate(const ExprTree& tree, std::span<const double> x,
                std::span<const double> params = {});

// Row-wise evaluation over an n-by-d observation matrix. Row i is bit-equal
// to evaluate() on row i.
Eigen::VectorXd evaluate_batch(const ExprTree& tree, const Eigen::MatrixXd& X,
                               std::span<const double> params = {});

double apply_unary(UnaryOp op, double v);
double apply_binary(BinaryOp op, double a, double b);

// Replaces every Parameter(i) with Constant(params[i]).
ExprTree substitute_parameters(const ExprTree& tree, std::span<const double> params);

}  // namespace xsr::expr
