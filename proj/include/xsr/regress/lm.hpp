#pragma once

#include <vector>

#include <Eigen/Core>

#include "xsr/expr/node.hpp"

namespace xsr::regress {

// Flattened evaluator for one expression over a fixed observation matrix.
// Produces per-row values and the Jacobian with respect to the Parameter
// nodes by analytic adjoint accumulation of the registered derivative rules.
class Tape {
public:
    Tape(const expr::ExprTree& tree, const Eigen::MatrixXd& X);

    int parameter_count() const { return parameter_count_; }

    // Model output per row for the given parameters.
    const Eigen::VectorXd& forward(const Eigen::VectorXd& theta);

    // d(output_row)/d(theta_j); forward() must have been called for the same
    // theta first.
    const Eigen::MatrixXd& jacobian();

private:
    struct Step {
        expr::Node::Kind kind;
        expr::UnaryOp unary_op;
        expr::BinaryOp binary_op;
        double value;
        int index;
        int left = -1;
        int right = -1;
    };

    std::vector<Step> steps_;  // postorder
    int parameter_count_ = 0;
    const Eigen::MatrixXd& X_;
    std::vector<Eigen::ArrayXd> values_;
    std::vector<Eigen::ArrayXd> adjoints_;
    Eigen::VectorXd output_;
    Eigen::MatrixXd jacobian_;

    int flatten(const expr::NodePtr& node);
};

struct LmOptions {
    int max_iterations = 25;
    double initial_damping = 1e-3;
    double relative_tolerance = 1e-10;  // stop on tiny accepted improvements
};

struct LmResult {
    Eigen::VectorXd theta;
    double initial_residual_norm = 0.0;
    double final_residual_norm = 0.0;
    int iterations = 0;
    bool success = false;                 // residuals were finite; theta is usable
    std::vector<double> residual_trace;   // norm after every accepted step
};

// Damped least squares on H(theta) = model(X; theta) - y with a multiply-by-2 /
// divide-by-3 damping schedule. Steps are accepted only when the residual
// norm decreases, so the final norm never exceeds the initial one. On
// failure the input parameters are returned unchanged.
LmResult levenberg_marquardt(const expr::ExprTree& tree, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, Eigen::VectorXd theta0,
                             const LmOptions& options = {});

}  // namespace xsr::regress
