#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "xsr/common/rng.hpp"
#include "xsr/expr/node.hpp"

namespace xsr::regress {

// PTC2 random tree initialization controlling both depth and node count.
// The realized tree never exceeds max_depth or max_size.
expr::ExprTree ptc2(Rng& rng, const expr::FunctionSet& functions, int dimension, int max_depth,
                    int max_size);

// Nonlinear-least-squares expansion: scale * body + offset, with every
// variable leaf wrapped in a fresh coefficient parameter and every constant
// promoted to a parameter. Returns the expanded tree and the starting
// parameter vector (constants keep their values, coefficients 1, scale 1,
// offset 0).
struct NlsExpansion {
    expr::ExprTree tree;
    Eigen::VectorXd theta0;
    int scale_index = -1;
    int offset_index = -1;
};

NlsExpansion expand_for_nls(const expr::ExprTree& tree);

}  // namespace xsr::regress
