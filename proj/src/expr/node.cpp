#include "xsr/expr/node.hpp"

#include <algorithm>
#include <set>

namespace xsr::expr {

const char* name_of(UnaryOp op) {
    switch (op) {
        case UnaryOp::Id: return "id";
        case UnaryOp::Log: return "log";
        case UnaryOp::Sqrt: return "sqrt";
        case UnaryOp::Sin: return "sin";
        case UnaryOp::Cos: return "cos";
        case UnaryOp::Tanh: return "tanh";
        case UnaryOp::Exp: return "exp";
        case UnaryOp::Expn: return "expn";
        case UnaryOp::Asin: return "asin";
        case UnaryOp::Square: return "square";
    }
    return "?";
}

const char* name_of(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "add";
        case BinaryOp::Sub: return "sub";
        case BinaryOp::Mul: return "mul";
        case BinaryOp::Div: return "div";
        case BinaryOp::Pow: return "pow";
    }
    return "?";
}

bool is_commutative(BinaryOp op) { return op == BinaryOp::Add || op == BinaryOp::Mul; }

struct NodeFactory {
    static std::shared_ptr<Node> make(Node::Kind kind) {
        return std::shared_ptr<Node>(new Node(kind));
    }
};

NodePtr Node::constant(double value) {
    auto n = NodeFactory::make(Kind::Constant);
    n->value_ = value;
    return n;
}

NodePtr Node::variable(int index) {
    if (index < 0) throw ContractError("variable index must be non-negative");
    auto n = NodeFactory::make(Kind::Variable);
    n->index_ = index;
    return n;
}

NodePtr Node::parameter(int index) {
    if (index < 0) throw ContractError("parameter index must be non-negative");
    auto n = NodeFactory::make(Kind::Parameter);
    n->index_ = index;
    return n;
}

NodePtr Node::unary(UnaryOp op, NodePtr child) {
    if (!child) throw ContractError("unary node requires a child");
    auto n = NodeFactory::make(Kind::Unary);
    n->unary_op_ = op;
    n->left_ = std::move(child);
    return n;
}

NodePtr Node::binary(BinaryOp op, NodePtr left, NodePtr right) {
    if (!left || !right) throw ContractError("binary node requires two children");
    auto n = NodeFactory::make(Kind::Binary);
    n->binary_op_ = op;
    n->left_ = std::move(left);
    n->right_ = std::move(right);
    return n;
}

namespace {

void scan(const NodePtr& node, int depth, int& size, int& max_depth, int& max_var, int& max_param) {
    ++size;
    max_depth = std::max(max_depth, depth);
    switch (node->kind()) {
        case Node::Kind::Constant:
            break;
        case Node::Kind::Variable:
            max_var = std::max(max_var, node->index());
            break;
        case Node::Kind::Parameter:
            max_param = std::max(max_param, node->index());
            break;
        case Node::Kind::Unary:
            scan(node->child(), depth + 1, size, max_depth, max_var, max_param);
            break;
        case Node::Kind::Binary:
            scan(node->left(), depth + 1, size, max_depth, max_var, max_param);
            scan(node->right(), depth + 1, size, max_depth, max_var, max_param);
            break;
    }
}

void collect_variables(const NodePtr& node, std::set<int>& vars) {
    switch (node->kind()) {
        case Node::Kind::Variable:
            vars.insert(node->index());
            break;
        case Node::Kind::Unary:
            collect_variables(node->child(), vars);
            break;
        case Node::Kind::Binary:
            collect_variables(node->left(), vars);
            collect_variables(node->right(), vars);
            break;
        default:
            break;
    }
}

}  // namespace

ExprTree::ExprTree(NodePtr root) : root_(std::move(root)) {
    if (!root_) throw ContractError("expression tree requires a root node");
    scan(root_, 1, size_, depth_, max_variable_, max_parameter_);
}

const NodePtr& ExprTree::root() const {
    if (!root_) throw ContractError("empty expression tree");
    return root_;
}

std::vector<int> ExprTree::variables_used() const {
    std::set<int> vars;
    if (root_) collect_variables(root_, vars);
    return {vars.begin(), vars.end()};
}

FunctionSet FunctionSet::it_transforms() {
    return {{UnaryOp::Log, UnaryOp::Sqrt, UnaryOp::Id, UnaryOp::Sin, UnaryOp::Cos,
             UnaryOp::Tanh, UnaryOp::Exp, UnaryOp::Expn, UnaryOp::Asin},
            {}};
}

FunctionSet FunctionSet::gp_default() {
    return {{UnaryOp::Exp, UnaryOp::Log, UnaryOp::Sqrt, UnaryOp::Square, UnaryOp::Sin,
             UnaryOp::Cos, UnaryOp::Tanh, UnaryOp::Asin},
            {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div}};
}

NodePtr integer_power(NodePtr base, long long exponent) {
    if (exponent == 0) return Node::constant(1.0);
    const bool negative = exponent < 0;
    const long long k = negative ? -exponent : exponent;
    if (k > 12) {
        return Node::binary(BinaryOp::Pow, std::move(base), Node::constant(static_cast<double>(exponent)));
    }
    NodePtr result = base;
    for (long long i = 1; i < k; ++i) {
        result = Node::binary(BinaryOp::Mul, result, base);
    }
    if (negative) {
        return Node::binary(BinaryOp::Div, Node::constant(1.0), result);
    }
    return result;
}

}  // namespace xsr::expr
