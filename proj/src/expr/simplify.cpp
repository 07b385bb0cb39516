#include "xsr/expr/simplify.hpp"

#include <cmath>
#include <cstring>

#include "xsr/common/quasirandom.hpp"
#include "xsr/expr/eval.hpp"

namespace xsr::expr {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t double_bits(double v) {
    // Normalize -0.0 so it hashes like 0.0.
    if (v == 0.0) v = 0.0;
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return bits;
}

}  // namespace

std::uint64_t structural_hash(const NodePtr& node) {
    switch (node->kind()) {
        case Node::Kind::Constant:
            return mix(0x01, double_bits(node->value()));
        case Node::Kind::Variable:
            return mix(0x02, static_cast<std::uint64_t>(node->index()));
        case Node::Kind::Parameter:
            return mix(0x03, static_cast<std::uint64_t>(node->index()));
        case Node::Kind::Unary:
            return mix(mix(0x04, static_cast<std::uint64_t>(node->unary_op())),
                       structural_hash(node->child()));
        case Node::Kind::Binary: {
            const std::uint64_t l = structural_hash(node->left());
            const std::uint64_t r = structural_hash(node->right());
            const std::uint64_t op = static_cast<std::uint64_t>(node->binary_op());
            if (is_commutative(node->binary_op())) {
                // Order-independent combination for commutative operators.
                return mix(mix(0x05, op), (l < r ? mix(l, r) : mix(r, l)));
            }
            return mix(mix(mix(0x06, op), l), r);
        }
    }
    return 0;
}

NodePtr canonicalize(const NodePtr& node) {
    switch (node->kind()) {
        case Node::Kind::Unary: {
            NodePtr child = canonicalize(node->child());
            return child == node->child() ? node : Node::unary(node->unary_op(), std::move(child));
        }
        case Node::Kind::Binary: {
            NodePtr left = canonicalize(node->left());
            NodePtr right = canonicalize(node->right());
            if (is_commutative(node->binary_op()) && structural_hash(left) > structural_hash(right)) {
                std::swap(left, right);
            }
            if (left == node->left() && right == node->right()) return node;
            return Node::binary(node->binary_op(), std::move(left), std::move(right));
        }
        default:
            return node;
    }
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case Node::Kind::Constant:
            return double_bits(a->value()) == double_bits(b->value());
        case Node::Kind::Variable:
        case Node::Kind::Parameter:
            return a->index() == b->index();
        case Node::Kind::Unary:
            return a->unary_op() == b->unary_op() && structurally_equal(a->child(), b->child());
        case Node::Kind::Binary:
            return a->binary_op() == b->binary_op() && structurally_equal(a->left(), b->left()) &&
                   structurally_equal(a->right(), b->right());
    }
    return false;
}

namespace {

bool is_const(const NodePtr& n) { return n->kind() == Node::Kind::Constant; }
bool is_const(const NodePtr& n, double v) { return is_const(n) && n->value() == v; }

NodePtr simplify_node(const NodePtr& node) {
    switch (node->kind()) {
        case Node::Kind::Constant:
        case Node::Kind::Variable:
        case Node::Kind::Parameter:
            return node;
        case Node::Kind::Unary: {
            NodePtr child = simplify_node(node->child());
            if (node->unary_op() == UnaryOp::Id) return child;
            if (is_const(child)) return Node::constant(apply_unary(node->unary_op(), child->value()));
            return child == node->child() ? node : Node::unary(node->unary_op(), std::move(child));
        }
        case Node::Kind::Binary:
            break;
    }

    NodePtr left = simplify_node(node->left());
    NodePtr right = simplify_node(node->right());
    const BinaryOp op = node->binary_op();

    if (is_commutative(op) && structural_hash(left) > structural_hash(right)) {
        std::swap(left, right);
    }
    if (is_const(left) && is_const(right)) {
        return Node::constant(apply_binary(op, left->value(), right->value()));
    }

    switch (op) {
        case BinaryOp::Add:
            if (is_const(left, 0.0)) return right;
            if (is_const(right, 0.0)) return left;
            break;
        case BinaryOp::Sub:
            if (is_const(right, 0.0)) return left;
            if (structurally_equal(canonicalize(left), canonicalize(right))) return Node::constant(0.0);
            break;
        case BinaryOp::Mul:
            if (is_const(left, 0.0) || is_const(right, 0.0)) return Node::constant(0.0);
            if (is_const(left, 1.0)) return right;
            if (is_const(right, 1.0)) return left;
            break;
        case BinaryOp::Div:
            if (is_const(right, 1.0)) return left;
            break;
        case BinaryOp::Pow:
            if (is_const(right, 0.0)) return Node::constant(1.0);  // IEEE pow(x,0) == 1
            if (is_const(right, 1.0)) return left;
            break;
    }
    if (left == node->left() && right == node->right()) return node;
    return Node::binary(op, std::move(left), std::move(right));
}

}  // namespace

ExprTree simplify(const ExprTree& tree) { return ExprTree(simplify_node(tree.root())); }

HitCheck check_hit(const ExprTree& candidate, const ExprTree& truth,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    if (candidate.parameter_count() > 0 || truth.parameter_count() > 0) {
        throw ContractError("hit check requires parameter-free expressions");
    }
    HitCheck result;

    const ExprTree difference = simplify(ExprTree(sub(candidate.root(), truth.root())));
    result.symbolic = difference.root()->kind() == Node::Kind::Constant &&
                      difference.root()->value() == 0.0;
    if (result.symbolic) {
        result.numeric = true;
        return result;
    }

    constexpr int kPoints = 10000;
    constexpr double kTolerance = 1e-10;
    const int d = static_cast<int>(lower.size());
    HaltonSequence halton(d);
    result.numeric = true;
    for (int i = 0; i < kPoints; ++i) {
        Eigen::VectorXd point = halton.next();
        point = lower + point.cwiseProduct(upper - lower);
        const std::span<const double> xs(point.data(), static_cast<std::size_t>(d));
        const double a = evaluate(candidate, xs);
        const double b = evaluate(truth, xs);
        if (!std::isfinite(a) && !std::isfinite(b)) continue;  // both out of domain
        if (!(std::abs(a - b) < kTolerance)) {
            result.numeric = false;
            break;
        }
    }
    return result;
}

}  // namespace xsr::expr
