#include <cmath>

#include "xsr/regress/lm.hpp"

namespace xsr::regress {

using expr::BinaryOp;
using expr::Node;
using expr::UnaryOp;

Tape::Tape(const expr::ExprTree& tree, const Eigen::MatrixXd& X) : X_(X) {
    flatten(tree.root());
    parameter_count_ = tree.parameter_count();
    values_.resize(steps_.size());
    adjoints_.resize(steps_.size());
}

int Tape::flatten(const expr::NodePtr& node) {
    Step step;
    step.kind = node->kind();
    step.unary_op = node->unary_op();
    step.binary_op = node->binary_op();
    step.value = node->value();
    step.index = node->index();
    switch (node->kind()) {
        case Node::Kind::Unary:
            step.left = flatten(node->child());
            break;
        case Node::Kind::Binary:
            step.left = flatten(node->left());
            step.right = flatten(node->right());
            break;
        default:
            break;
    }
    steps_.push_back(step);
    return static_cast<int>(steps_.size()) - 1;
}

const Eigen::VectorXd& Tape::forward(const Eigen::VectorXd& theta) {
    const Eigen::Index n = X_.rows();
    for (std::size_t s = 0; s < steps_.size(); ++s) {
        const Step& step = steps_[s];
        Eigen::ArrayXd& out = values_[s];
        out.resize(n);
        switch (step.kind) {
            case Node::Kind::Constant:
                out.setConstant(step.value);
                break;
            case Node::Kind::Parameter:
                out.setConstant(theta[step.index]);
                break;
            case Node::Kind::Variable:
                out = X_.col(step.index).array();
                break;
            case Node::Kind::Unary: {
                const Eigen::ArrayXd& u = values_[static_cast<std::size_t>(step.left)];
                switch (step.unary_op) {
                    case UnaryOp::Id: out = u; break;
                    case UnaryOp::Log: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::log(u[i]); break;
                    case UnaryOp::Sqrt: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::sqrt(u[i]); break;
                    case UnaryOp::Sin: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::sin(u[i]); break;
                    case UnaryOp::Cos: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::cos(u[i]); break;
                    case UnaryOp::Tanh: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::tanh(u[i]); break;
                    case UnaryOp::Exp: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::exp(u[i]); break;
                    case UnaryOp::Expn: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::exp(-u[i]); break;
                    case UnaryOp::Asin: for (Eigen::Index i = 0; i < n; ++i) out[i] = std::asin(u[i]); break;
                    case UnaryOp::Square: out = u * u; break;
                }
                break;
            }
            case Node::Kind::Binary: {
                const Eigen::ArrayXd& a = values_[static_cast<std::size_t>(step.left)];
                const Eigen::ArrayXd& b = values_[static_cast<std::size_t>(step.right)];
                switch (step.binary_op) {
                    case BinaryOp::Add: out = a + b; break;
                    case BinaryOp::Sub: out = a - b; break;
                    case BinaryOp::Mul: out = a * b; break;
                    case BinaryOp::Div: out = a / b; break;
                    case BinaryOp::Pow:
                        for (Eigen::Index i = 0; i < n; ++i) out[i] = std::pow(a[i], b[i]);
                        break;
                }
                break;
            }
        }
    }
    output_ = values_.back().matrix();
    return output_;
}

const Eigen::MatrixXd& Tape::jacobian() {
    const Eigen::Index n = X_.rows();
    jacobian_.setZero(n, parameter_count_);
    for (auto& a : adjoints_) {
        a.setZero(n);
    }
    adjoints_.back().setOnes(n);

    for (std::size_t s = steps_.size(); s-- > 0;) {
        const Step& step = steps_[s];
        const Eigen::ArrayXd& adj = adjoints_[s];
        switch (step.kind) {
            case Node::Kind::Parameter:
                jacobian_.col(step.index).array() += adj;
                break;
            case Node::Kind::Unary: {
                const Eigen::ArrayXd& u = values_[static_cast<std::size_t>(step.left)];
                Eigen::ArrayXd& down = adjoints_[static_cast<std::size_t>(step.left)];
                switch (step.unary_op) {
                    case UnaryOp::Id: down += adj; break;
                    case UnaryOp::Log: down += adj / u; break;
                    case UnaryOp::Sqrt: down += adj / (2.0 * values_[s]); break;
                    case UnaryOp::Sin: down += adj * u.cos(); break;
                    case UnaryOp::Cos: down -= adj * u.sin(); break;
                    case UnaryOp::Tanh: down += adj * (1.0 - values_[s] * values_[s]); break;
                    case UnaryOp::Exp: down += adj * values_[s]; break;
                    case UnaryOp::Expn: down -= adj * values_[s]; break;
                    case UnaryOp::Asin: down += adj / (1.0 - u * u).sqrt(); break;
                    case UnaryOp::Square: down += adj * 2.0 * u; break;
                }
                break;
            }
            case Node::Kind::Binary: {
                const Eigen::ArrayXd& a = values_[static_cast<std::size_t>(step.left)];
                const Eigen::ArrayXd& b = values_[static_cast<std::size_t>(step.right)];
                Eigen::ArrayXd& down_a = adjoints_[static_cast<std::size_t>(step.left)];
                Eigen::ArrayXd& down_b = adjoints_[static_cast<std::size_t>(step.right)];
                switch (step.binary_op) {
                    case BinaryOp::Add:
                        down_a += adj;
                        down_b += adj;
                        break;
                    case BinaryOp::Sub:
                        down_a += adj;
                        down_b -= adj;
                        break;
                    case BinaryOp::Mul:
                        down_a += adj * b;
                        down_b += adj * a;
                        break;
                    case BinaryOp::Div:
                        down_a += adj / b;
                        down_b -= adj * a / (b * b);
                        break;
                    case BinaryOp::Pow:
                        // d/da a^b = b a^(b-1), d/db a^b = a^b log a
                        down_a += adj * b * values_[s] / a;
                        down_b += adj * values_[s] * a.log();
                        break;
                }
                break;
            }
            default:
                break;
        }
    }
    return jacobian_;
}

}  // namespace xsr::regress
