#include <cmath>

#include <Eigen/Dense>

#include "xsr/common/error.hpp"
#include "xsr/regress/lm.hpp"

namespace xsr::regress {

LmResult levenberg_marquardt(const expr::ExprTree& tree, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, Eigen::VectorXd theta0,
                             const LmOptions& options) {
    if (tree.parameter_count() != theta0.size()) {
        throw ContractError("parameter vector length does not match the expression");
    }

    LmResult result;
    result.theta = theta0;

    Tape tape(tree, X);
    Eigen::VectorXd residual = tape.forward(theta0) - y;
    double norm = residual.norm();
    result.initial_residual_norm = norm;
    result.final_residual_norm = norm;
    if (!std::isfinite(norm)) {
        return result;  // model not evaluable at the start point
    }

    double damping = options.initial_damping;
    Eigen::VectorXd theta = theta0;

    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        ++result.iterations;
        const Eigen::MatrixXd& J = tape.jacobian();
        if (!J.allFinite()) break;

        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd gradient = J.transpose() * residual;
        Eigen::VectorXd scale = JtJ.diagonal().cwiseMax(1e-12);

        bool accepted = false;
        // Inner damping search: reject increases the damping (x2) and retries,
        // acceptance relaxes it (/3).
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd system = JtJ;
            system.diagonal() += damping * scale;
            const Eigen::VectorXd step = system.ldlt().solve(-gradient);
            if (!step.allFinite()) {
                damping *= 2.0;
                continue;
            }
            const Eigen::VectorXd candidate = theta + step;
            const Eigen::VectorXd candidate_residual = tape.forward(candidate) - y;
            const double candidate_norm = candidate_residual.norm();
            if (std::isfinite(candidate_norm) && candidate_norm < norm) {
                const double improvement = (norm - candidate_norm) / std::max(norm, 1e-300);
                theta = candidate;
                residual = candidate_residual;
                norm = candidate_norm;
                damping /= 3.0;
                accepted = true;
                result.residual_trace.push_back(norm);
                if (improvement < options.relative_tolerance) {
                    iteration = options.max_iterations;  // converged
                }
                break;
            }
            damping *= 2.0;
        }
        if (!accepted) break;
        // forward() state now corresponds to the accepted theta, so the next
        // jacobian() call is consistent.
    }

    // Zero accepted steps with a finite start is still a usable outcome: the
    // parameters simply stay where they began.
    if (std::isfinite(norm)) {
        result.success = true;
        result.theta = theta;
        result.final_residual_norm = norm;
    }
    return result;
}

}  // namespace xsr::regress
