#include <chrono>
#include <cmath>

#include <Eigen/Dense>

#include "xsr/regress/trainers.hpp"

namespace xsr::regress {

namespace {

class LinearPredictor final : public Predictor {
public:
    LinearPredictor(double intercept, Eigen::VectorXd coefficients)
        : intercept_(intercept), coefficients_(std::move(coefficients)) {}

    double predict_one(std::span<const double> x) const override {
        double acc = intercept_;
        for (Eigen::Index j = 0; j < coefficients_.size(); ++j) {
            acc += coefficients_[j] * x[static_cast<std::size_t>(j)];
        }
        return acc;
    }

    nlohmann::json structure_json() const override {
        return {{"intercept", intercept_},
                {"coefficients", std::vector<double>(coefficients_.begin(), coefficients_.end())}};
    }

    double intercept_;
    Eigen::VectorXd coefficients_;
};

expr::ExprTree linear_form(double intercept, const Eigen::VectorXd& beta) {
    expr::NodePtr node = expr::c(intercept);
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        node = expr::add(std::move(node), expr::mul(expr::c(beta[j]), expr::x(static_cast<int>(j))));
    }
    return expr::ExprTree(std::move(node));
}

FittedModel package_linear(const std::string& kind, double intercept, Eigen::VectorXd beta,
                           ModelInfo info, bool mask_from_nonzero) {
    const int d = static_cast<int>(beta.size());
    std::vector<bool> mask(static_cast<std::size_t>(d), true);
    if (mask_from_nonzero) {
        for (int j = 0; j < d; ++j) mask[static_cast<std::size_t>(j)] = beta[j] != 0.0;
    }
    expr::ExprTree form = linear_form(intercept, beta);
    auto predictor = std::make_shared<LinearPredictor>(intercept, std::move(beta));
    return FittedModel(kind, std::move(predictor), std::move(form), std::move(mask), std::move(info));
}

}  // namespace

FittedModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto start = std::chrono::steady_clock::now();
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    Eigen::MatrixXd design(n, d + 1);
    design.col(0).setOnes();
    design.rightCols(d) = X;

    ModelInfo info;
    info.hyper_params = nlohmann::json::object();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    Eigen::VectorXd solution;
    if (qr.rank() < d + 1) {
        // Minimum-norm solution on rank deficiency.
        solution = design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
        info.flagged = true;
        info.flag_reason = "rank-deficient design matrix; minimum-norm solution";
    } else {
        solution = qr.solve(y);
    }

    info.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return package_linear("linear", solution[0], solution.tail(d), std::move(info), false);
}

FittedModel fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                      const LassoOptions& options) {
    if (alpha < 0) throw ContractError("lasso requires alpha >= 0");
    const auto start = std::chrono::steady_clock::now();
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();

    // Standardize: center y, z-score columns by the population deviation so
    // that (1/n) * ||z_j||^2 == 1 and the classic soft-threshold update applies.
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;
    Eigen::VectorXd col_mean(d), col_scale(d);
    Eigen::MatrixXd Z(n, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        col_mean[j] = X.col(j).mean();
        const Eigen::VectorXd centered = X.col(j).array() - col_mean[j];
        const double scale = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
        col_scale[j] = scale > 0 ? scale : 1.0;
        Z.col(j) = centered / col_scale[j];
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd residual = yc;
    const double inv_n = 1.0 / static_cast<double>(n);

    int sweeps = 0;
    bool converged = false;
    for (; sweeps < options.max_sweeps; ++sweeps) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const double old = beta[j];
            const double rho = inv_n * Z.col(j).dot(residual) + old;
            double updated = 0.0;
            if (rho > alpha) {
                updated = rho - alpha;
            } else if (rho < -alpha) {
                updated = rho + alpha;
            }
            if (updated != old) {
                residual += Z.col(j) * (old - updated);
                beta[j] = updated;
            }
        }
        // Duality gap for the standardized problem; at alpha == 0 it reduces
        // to the gradient sup-norm.
        const Eigen::VectorXd grad = inv_n * (Z.transpose() * residual);
        double gap;
        if (alpha == 0.0) {
            gap = grad.lpNorm<Eigen::Infinity>();
        } else {
            const double dual_scale = std::min(1.0, alpha / std::max(grad.lpNorm<Eigen::Infinity>(), 1e-300));
            const Eigen::VectorXd theta = residual * (dual_scale * inv_n);
            const double primal = 0.5 * inv_n * residual.squaredNorm() + alpha * beta.lpNorm<1>();
            const double dual = -0.5 * static_cast<double>(n) * theta.squaredNorm() + theta.dot(yc);
            gap = primal - dual;
        }
        if (gap < options.tolerance) {
            converged = true;
            ++sweeps;
            break;
        }
    }

    // Back-transform to the original scale.
    Eigen::VectorXd coefficients(d);
    for (Eigen::Index j = 0; j < d; ++j) coefficients[j] = beta[j] / col_scale[j];
    const double intercept = y_mean - coefficients.dot(col_mean);

    ModelInfo info;
    info.hyper_params = {{"alpha", alpha}};
    info.flagged = !converged;
    if (!converged) info.flag_reason = "coordinate descent did not reach the duality-gap tolerance";
    info.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return package_linear("lasso", intercept, std::move(coefficients), std::move(info), true);
}

}  // namespace xsr::regress
