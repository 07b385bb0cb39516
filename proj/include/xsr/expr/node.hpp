#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "xsr/common/error.hpp"

namespace xsr::expr {

enum class UnaryOp : std::uint8_t {
    Id,
    Log,
    Sqrt,
    Sin,
    Cos,
    Tanh,
    Exp,
    Expn,  // exp(-x)
    Asin,
    Square,
};

enum class BinaryOp : std::uint8_t {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

const char* name_of(UnaryOp op);
const char* name_of(BinaryOp op);
bool is_commutative(BinaryOp op);

class Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable expression node. Trees share subtrees freely; a "tree" is the
// logical unfolding reached by traversal.
class Node {
public:
    enum class Kind : std::uint8_t { Constant, Variable, Parameter, Unary, Binary };

    static NodePtr constant(double value);
    static NodePtr variable(int index);
    static NodePtr parameter(int index);
    static NodePtr unary(UnaryOp op, NodePtr child);
    static NodePtr binary(BinaryOp op, NodePtr left, NodePtr right);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    int index() const { return index_; }
    UnaryOp unary_op() const { return unary_op_; }
    BinaryOp binary_op() const { return binary_op_; }
    const NodePtr& left() const { return left_; }
    const NodePtr& right() const { return right_; }
    const NodePtr& child() const { return left_; }

private:
    Kind kind_;
    double value_ = 0.0;
    int index_ = -1;
    UnaryOp unary_op_ = UnaryOp::Id;
    BinaryOp binary_op_ = BinaryOp::Add;
    NodePtr left_;
    NodePtr right_;

    explicit Node(Kind kind) : kind_(kind) {}
    friend struct NodeFactory;
};

// Value-semantics handle over an immutable node graph.
class ExprTree {
public:
    ExprTree() = default;
    explicit ExprTree(NodePtr root);

    bool empty() const { return root_ == nullptr; }
    const NodePtr& root() const;

    // Total node count (shared subtrees counted once per occurrence).
    int size() const { return size_; }
    int depth() const { return depth_; }

    // Largest variable index used, or -1 when the tree has no variables.
    int max_variable_index() const { return max_variable_; }
    // One past the largest parameter index, 0 when parameter-free.
    int parameter_count() const { return max_parameter_ + 1; }

    std::vector<int> variables_used() const;

private:
    NodePtr root_;
    int size_ = 0;
    int depth_ = 0;
    int max_variable_ = -1;
    int max_parameter_ = -1;
};

// Subsets of the primitive set made available to a search algorithm. Every
// listed operation has both an evaluation and a differentiation rule.
struct FunctionSet {
    std::vector<UnaryOp> unary;
    std::vector<BinaryOp> binary;

    // log, sqrt, id, sin, cos, tanh, exp, expn, arcsin
    static FunctionSet it_transforms();
    // +, -, *, / with exp, log, sqrt, square, sin, cos, tanh, asin
    static FunctionSet gp_default();
};

// Convenience builders used throughout construction code and tests.
inline NodePtr c(double v) { return Node::constant(v); }
inline NodePtr x(int i) { return Node::variable(i); }
inline NodePtr p(int i) { return Node::parameter(i); }
inline NodePtr add(NodePtr a, NodePtr b) { return Node::binary(BinaryOp::Add, std::move(a), std::move(b)); }
inline NodePtr sub(NodePtr a, NodePtr b) { return Node::binary(BinaryOp::Sub, std::move(a), std::move(b)); }
inline NodePtr mul(NodePtr a, NodePtr b) { return Node::binary(BinaryOp::Mul, std::move(a), std::move(b)); }
inline NodePtr div(NodePtr a, NodePtr b) { return Node::binary(BinaryOp::Div, std::move(a), std::move(b)); }
inline NodePtr unary(UnaryOp op, NodePtr a) { return Node::unary(op, std::move(a)); }

// Integer power expanded as repeated multiplication for |exponent| <= 12,
// a Pow primitive beyond that. exponent 0 collapses to the constant 1.
NodePtr integer_power(NodePtr base, long long exponent);

}  // namespace xsr::expr
