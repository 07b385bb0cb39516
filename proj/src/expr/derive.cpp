#include "xsr/expr/derive.hpp"

#include "xsr/expr/simplify.hpp"

namespace xsr::expr {

namespace {

bool is_constant(const NodePtr& n, double v) {
    return n->kind() == Node::Kind::Constant && n->value() == v;
}

// Constructors with local folding keep derivative trees from ballooning.
NodePtr d_add(NodePtr a, NodePtr b) {
    if (is_constant(a, 0.0)) return b;
    if (is_constant(b, 0.0)) return a;
    return add(std::move(a), std::move(b));
}

NodePtr d_sub(NodePtr a, NodePtr b) {
    if (is_constant(b, 0.0)) return a;
    return sub(std::move(a), std::move(b));
}

NodePtr d_mul(NodePtr a, NodePtr b) {
    if (is_constant(a, 0.0) || is_constant(b, 0.0)) return c(0.0);
    if (is_constant(a, 1.0)) return b;
    if (is_constant(b, 1.0)) return a;
    return mul(std::move(a), std::move(b));
}

NodePtr d_div(NodePtr a, NodePtr b) {
    if (is_constant(a, 0.0)) return c(0.0);
    return div(std::move(a), std::move(b));
}

NodePtr derive(const NodePtr& node, DiffVar wrt);

NodePtr derive_unary(const NodePtr& node, DiffVar wrt) {
    const NodePtr& u = node->child();
    NodePtr du = derive(u, wrt);
    switch (node->unary_op()) {
        case UnaryOp::Id:
            return du;
        case UnaryOp::Log:
            return d_div(std::move(du), u);
        case UnaryOp::Sqrt:
            return d_div(std::move(du), mul(c(2.0), unary(UnaryOp::Sqrt, u)));
        case UnaryOp::Sin:
            return d_mul(unary(UnaryOp::Cos, u), std::move(du));
        case UnaryOp::Cos:
            return d_mul(c(-1.0), d_mul(unary(UnaryOp::Sin, u), std::move(du)));
        case UnaryOp::Tanh:
            return d_mul(sub(c(1.0), unary(UnaryOp::Square, unary(UnaryOp::Tanh, u))), std::move(du));
        case UnaryOp::Exp:
            return d_mul(unary(UnaryOp::Exp, u), std::move(du));
        case UnaryOp::Expn:
            return d_mul(c(-1.0), d_mul(unary(UnaryOp::Expn, u), std::move(du)));
        case UnaryOp::Asin:
            return d_div(std::move(du), unary(UnaryOp::Sqrt, sub(c(1.0), unary(UnaryOp::Square, u))));
        case UnaryOp::Square:
            return d_mul(mul(c(2.0), u), std::move(du));
    }
    throw Error("no differentiation rule registered for unary primitive");
}

NodePtr derive_binary(const NodePtr& node, DiffVar wrt) {
    const NodePtr& u = node->left();
    const NodePtr& v = node->right();
    switch (node->binary_op()) {
        case BinaryOp::Add:
            return d_add(derive(u, wrt), derive(v, wrt));
        case BinaryOp::Sub:
            return d_sub(derive(u, wrt), derive(v, wrt));
        case BinaryOp::Mul:
            return d_add(d_mul(derive(u, wrt), v), d_mul(u, derive(v, wrt)));
        case BinaryOp::Div:
            // (u'v - uv') / v^2
            return d_div(d_sub(d_mul(derive(u, wrt), v), d_mul(u, derive(v, wrt))),
                         unary(UnaryOp::Square, v));
        case BinaryOp::Pow: {
            if (v->kind() == Node::Kind::Constant) {
                // c * u^(c-1) * u'
                const double e = v->value();
                return d_mul(c(e), d_mul(Node::binary(BinaryOp::Pow, u, c(e - 1.0)), derive(u, wrt)));
            }
            // u^v * (v' log u + v u' / u)
            NodePtr term = d_add(d_mul(derive(v, wrt), unary(UnaryOp::Log, u)),
                                 d_div(d_mul(v, derive(u, wrt)), u));
            return d_mul(node, std::move(term));
        }
    }
    throw Error("no differentiation rule registered for binary primitive");
}

NodePtr derive(const NodePtr& node, DiffVar wrt) {
    switch (node->kind()) {
        case Node::Kind::Constant:
            return c(0.0);
        case Node::Kind::Variable:
            return c(wrt.kind == DiffVar::Kind::Variable && node->index() == wrt.index ? 1.0 : 0.0);
        case Node::Kind::Parameter:
            return c(wrt.kind == DiffVar::Kind::Parameter && node->index() == wrt.index ? 1.0 : 0.0);
        case Node::Kind::Unary:
            return derive_unary(node, wrt);
        case Node::Kind::Binary:
            return derive_binary(node, wrt);
    }
    throw Error("unknown node kind");
}

}  // namespace

ExprTree differentiate(const ExprTree& tree, DiffVar wrt) {
    return simplify(ExprTree(derive(tree.root(), wrt)));
}

}  // namespace xsr::expr
