#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "xsr/expr/node.hpp"

namespace xsr::expr {

// Structural hash; insensitive to shared-pointer identity. Commutative
// operands are combined order-independently so that hash-based canonical
// ordering is stable.
std::uint64_t structural_hash(const NodePtr& node);

// Reorders commutative operands by structural hash, bottom-up. Two trees that
// differ only in commutative operand order canonicalize identically.
NodePtr canonicalize(const NodePtr& node);

bool structurally_equal(const NodePtr& a, const NodePtr& b);

// Algebraic cleanup: constant folding, 0*a -> 0, a+0 -> a, a-0 -> a,
// a*1 -> a, a/1 -> a, x^0 -> 1, id(a) -> a, and f-f -> 0 for subtrees that
// are structurally equal after canonical ordering. The result evaluates
// identically at every finite point where the input is finite.
ExprTree simplify(const ExprTree& tree);

struct HitCheck {
    bool symbolic = false;  // simplify(candidate - truth) is the constant 0
    bool numeric = false;   // |difference| < 1e-10 on 10,000 quasi-random domain points
    bool hit() const { return symbolic || numeric; }
};

// Checks whether a candidate expression matches the generating truth over the
// given per-feature bounds. Both trees must be parameter-free.
HitCheck check_hit(const ExprTree& candidate, const ExprTree& truth,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

inline bool is_hit(const ExprTree& candidate, const ExprTree& truth,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    return check_hit(candidate, truth, lower, upper).hit();
}

}  // namespace xsr::expr
