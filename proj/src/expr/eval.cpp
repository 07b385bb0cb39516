#include "xsr/expr/eval.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace xsr::expr {

double apply_unary(UnaryOp op, double v) {
    switch (op) {
        case UnaryOp::Id: return v;
        case UnaryOp::Log: return std::log(v);
        case UnaryOp::Sqrt: return std::sqrt(v);
        case UnaryOp::Sin: return std::sin(v);
        case UnaryOp::Cos: return std::cos(v);
        case UnaryOp::Tanh: return std::tanh(v);
        case UnaryOp::Exp: return std::exp(v);
        case UnaryOp::Expn: return std::exp(-v);
        case UnaryOp::Asin: return std::asin(v);
        case UnaryOp::Square: return v * v;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double apply_binary(BinaryOp op, double a, double b) {
    switch (op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        case BinaryOp::Pow: return std::pow(a, b);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

void check_indices(const ExprTree& tree, std::size_t d, std::size_t p) {
    if (tree.max_variable_index() >= static_cast<int>(d)) {
        throw ContractError("variable index " + std::to_string(tree.max_variable_index()) +
                            " out of range for dimensionality " + std::to_string(d));
    }
    if (tree.parameter_count() > static_cast<int>(p)) {
        throw ContractError("parameter index " + std::to_string(tree.parameter_count() - 1) +
                            " out of range for parameter vector of length " + std::to_string(p));
    }
}

double eval_node(const Node& node, std::span<const double> x, std::span<const double> params) {
    switch (node.kind()) {
        case Node::Kind::Constant: return node.value();
        case Node::Kind::Variable: return x[static_cast<std::size_t>(node.index())];
        case Node::Kind::Parameter: return params[static_cast<std::size_t>(node.index())];
        case Node::Kind::Unary: return apply_unary(node.unary_op(), eval_node(*node.child(), x, params));
        case Node::Kind::Binary:
            return apply_binary(node.binary_op(), eval_node(*node.left(), x, params),
                                eval_node(*node.right(), x, params));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Batch evaluation uses plain element loops with the exact std:: calls of the
// scalar path, so batch and scalar results are bit-identical.
using Column = std::vector<double>;

Column eval_node_batch(const Node& node, const Eigen::MatrixXd& X, std::span<const double> params) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    switch (node.kind()) {
        case Node::Kind::Constant:
            return Column(n, node.value());
        case Node::Kind::Parameter:
            return Column(n, params[static_cast<std::size_t>(node.index())]);
        case Node::Kind::Variable: {
            Column out(n);
            const auto col = X.col(node.index());
            for (std::size_t i = 0; i < n; ++i) out[i] = col[static_cast<Eigen::Index>(i)];
            return out;
        }
        case Node::Kind::Unary: {
            Column out = eval_node_batch(*node.child(), X, params);
            const UnaryOp op = node.unary_op();
            for (auto& v : out) v = apply_unary(op, v);
            return out;
        }
        case Node::Kind::Binary: {
            Column lhs = eval_node_batch(*node.left(), X, params);
            const Column rhs = eval_node_batch(*node.right(), X, params);
            const BinaryOp op = node.binary_op();
            for (std::size_t i = 0; i < n; ++i) lhs[i] = apply_binary(op, lhs[i], rhs[i]);
            return lhs;
        }
    }
    return Column(n, std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

double evaluate(const ExprTree& tree, std::span<const double> x, std::span<const double> params) {
    check_indices(tree, x.size(), params.size());
    return eval_node(*tree.root(), x, params);
}

Eigen::VectorXd evaluate_batch(const ExprTree& tree, const Eigen::MatrixXd& X,
                               std::span<const double> params) {
    check_indices(tree, static_cast<std::size_t>(X.cols()), params.size());
    if (X.rows() == 0) return Eigen::VectorXd(0);
    const Column out = eval_node_batch(*tree.root(), X, params);
    return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

namespace {

NodePtr substitute(const NodePtr& node, std::span<const double> params) {
    switch (node->kind()) {
        case Node::Kind::Parameter:
            return Node::constant(params[static_cast<std::size_t>(node->index())]);
        case Node::Kind::Unary: {
            NodePtr child = substitute(node->child(), params);
            return child == node->child() ? node : Node::unary(node->unary_op(), std::move(child));
        }
        case Node::Kind::Binary: {
            NodePtr left = substitute(node->left(), params);
            NodePtr right = substitute(node->right(), params);
            if (left == node->left() && right == node->right()) return node;
            return Node::binary(node->binary_op(), std::move(left), std::move(right));
        }
        default:
            return node;
    }
}

}  // namespace

ExprTree substitute_parameters(const ExprTree& tree, std::span<const double> params) {
    if (tree.parameter_count() > static_cast<int>(params.size())) {
        throw ContractError("parameter vector too short for substitution");
    }
    return ExprTree(substitute(tree.root(), params));
}

}  // namespace xsr::expr
