#include "fusedlasso/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fusedlasso/error.hpp"
#include "fusedlasso/glm.hpp"
#include "fusedlasso/partition.hpp"

namespace fusedlasso {

const char* to_string(Loss loss) noexcept {
    switch (loss) {
        case Loss::squared: return "squared";
        case Loss::logistic: return "logistic";
        case Loss::cox: return "cox";
    }
    return "unknown";
}

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorCode::non_finite, std::string(what) + " contains non-finite values");
    }
}

void require_lambda(double lambda, const char* name) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw Error(ErrorCode::invalid_argument, std::string(name) + " must be finite and >= 0");
    }
}

void require_beta(const FusedProblem& problem, const Eigen::VectorXd& beta) {
    if (beta.size() != problem.p()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "beta has length " + std::to_string(beta.size()) + ", expected p = " +
                        std::to_string(problem.p()));
    }
    if (!beta.allFinite()) {
        throw Error(ErrorCode::non_finite, "beta contains non-finite values");
    }
}

} // namespace

FusedProblem::FusedProblem(std::shared_ptr<const Data> data, double lambda1, double lambda2)
    : data_(std::move(data)), lambda1_(lambda1), lambda2_(lambda2) {
    require_lambda(lambda1, "lambda1");
    require_lambda(lambda2, "lambda2");
}

std::shared_ptr<const FusedProblem::Data> FusedProblem::make_data(Loss loss, Eigen::MatrixXd X,
                                                                  Eigen::VectorXd y,
                                                                  Eigen::VectorXd linear,
                                                                  PenaltyGraph graph, CoxData cox) {
    require_finite(X, "design matrix");
    if (X.cols() != graph.size()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "design matrix has " + std::to_string(X.cols()) +
                        " columns but the penalty graph has " + std::to_string(graph.size()) +
                        " nodes");
    }
    if (loss != Loss::cox) {
        if (y.size() != X.rows()) {
            throw Error(ErrorCode::dimension_mismatch,
                        "response has length " + std::to_string(y.size()) + ", expected n = " +
                            std::to_string(X.rows()));
        }
        require_finite(y, "response");
    }
    if (linear.size() != 0) {
        if (linear.size() != X.cols()) {
            throw Error(ErrorCode::dimension_mismatch, "linear term length must equal p");
        }
        require_finite(linear, "linear term");
    }
    if (loss == Loss::logistic) {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y[i] != 0.0 && y[i] != 1.0) {
                throw Error(ErrorCode::invalid_argument,
                            "logistic response must be 0 or 1 (row " + std::to_string(i + 1) + ")");
            }
        }
    }
    if (loss == Loss::cox) validate_cox_data(cox, static_cast<int>(X.rows()));

    auto data = std::make_shared<Data>();
    data->loss = loss;
    data->col_sq_norms = X.colwise().squaredNorm().transpose();
    data->X = std::move(X);
    data->y = std::move(y);
    data->linear = std::move(linear);
    data->graph = std::move(graph);
    data->cox = std::move(cox);
    return data;
}

FusedProblem FusedProblem::squared(Eigen::MatrixXd X, Eigen::VectorXd y, PenaltyGraph graph,
                                   double lambda1, double lambda2) {
    return FusedProblem(make_data(Loss::squared, std::move(X), std::move(y), {}, std::move(graph), {}),
                        lambda1, lambda2);
}

FusedProblem FusedProblem::weighted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& obs_weights, PenaltyGraph graph,
                                    double lambda1, double lambda2) {
    if (obs_weights.size() != X.rows() || y.size() != X.rows()) {
        throw Error(ErrorCode::dimension_mismatch, "observation weights and response must have length n");
    }
    if (!obs_weights.allFinite() || (obs_weights.array() < 0.0).any()) {
        throw Error(ErrorCode::invalid_argument, "observation weights must be finite and >= 0");
    }
    Eigen::VectorXd root = obs_weights.array().sqrt();
    Eigen::MatrixXd Xs = root.asDiagonal() * X;
    Eigen::VectorXd ys = root.cwiseProduct(y);
    return squared(std::move(Xs), std::move(ys), std::move(graph), lambda1, lambda2);
}

FusedProblem FusedProblem::quadratic(Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::VectorXd linear,
                                     PenaltyGraph graph, double lambda1, double lambda2) {
    return FusedProblem(make_data(Loss::squared, std::move(X), std::move(y), std::move(linear),
                                  std::move(graph), {}),
                        lambda1, lambda2);
}

FusedProblem FusedProblem::logistic(Eigen::MatrixXd X, Eigen::VectorXd y, PenaltyGraph graph,
                                    double lambda1, double lambda2) {
    return FusedProblem(
        make_data(Loss::logistic, std::move(X), std::move(y), {}, std::move(graph), {}), lambda1,
        lambda2);
}

FusedProblem FusedProblem::cox(Eigen::MatrixXd X, CoxData response, PenaltyGraph graph,
                               double lambda1, double lambda2) {
    return FusedProblem(make_data(Loss::cox, std::move(X), Eigen::VectorXd(), {}, std::move(graph),
                                  std::move(response)),
                        lambda1, lambda2);
}

FusedProblem FusedProblem::with_lambdas(double lambda1, double lambda2) const {
    return FusedProblem(data_, lambda1, lambda2);
}

double penalty_value(const PenaltyGraph& graph, double lambda1, double lambda2,
                     const Eigen::VectorXd& beta) {
    double l1 = 0.0;
    for (int k = 0; k < graph.size(); ++k) l1 += graph.node_weight(k) * std::abs(beta[k]);
    double fusion = 0.0;
    for (const auto& e : graph.edges()) fusion += e.weight * std::abs(beta[e.k] - beta[e.l]);
    return lambda1 * l1 + lambda2 * fusion;
}

double data_loss(const FusedProblem& problem, const Eigen::VectorXd& beta) {
    require_beta(problem, beta);
    switch (problem.loss()) {
        case Loss::squared: {
            double value = 0.5 * (problem.y() - problem.X() * beta).squaredNorm();
            if (problem.has_linear_term()) value -= problem.linear_term().dot(beta);
            return value;
        }
        case Loss::logistic:
            return logistic_negative_log_likelihood(problem.X(), problem.y(), beta);
        case Loss::cox:
            return -cox_log_partial_likelihood(problem.X(), problem.cox_data(), beta);
    }
    return 0.0;
}

double loss_value(const FusedProblem& problem, const Eigen::VectorXd& beta) {
    double value = data_loss(problem, beta) +
                   penalty_value(problem.graph(), problem.lambda1(), problem.lambda2(), beta);
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::non_finite, "objective evaluated to a non-finite value");
    }
    return value;
}

Eigen::VectorXd data_gradient(const FusedProblem& problem, const Eigen::VectorXd& beta) {
    require_beta(problem, beta);
    switch (problem.loss()) {
        case Loss::squared: {
            Eigen::VectorXd g = -problem.X().transpose() * (problem.y() - problem.X() * beta);
            if (problem.has_linear_term()) g -= problem.linear_term();
            return g;
        }
        case Loss::logistic: {
            Eigen::VectorXd eta = problem.X() * beta;
            Eigen::VectorXd prob = eta.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
            return -problem.X().transpose() * (problem.y() - prob);
        }
        case Loss::cox:
            return -cox_gradient(problem.X(), problem.cox_data(), beta);
    }
    return {};
}

Eigen::VectorXd loss_gradient_smooth_part(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                          const Partition& partition) {
    require_beta(problem, beta);
    const auto& graph = problem.graph();
    if (static_cast<int>(partition.set_of.size()) != problem.p()) {
        throw Error(ErrorCode::inconsistent_partition, "partition does not cover p nodes");
    }
    for (int k = 0; k < problem.p(); ++k) {
        int s = partition.set_of[k];
        if (s < 0 || s >= partition.size() || !nearly_equal(beta[k], partition.values[s])) {
            throw Error(ErrorCode::inconsistent_partition,
                        "beta_" + std::to_string(k + 1) + " differs from the value of its set");
        }
    }
    Eigen::VectorXd grad = data_gradient(problem, beta);
    if (problem.lambda2() == 0.0) return grad;
    for (const auto& e : graph.edges()) {
        int a = partition.set_of[e.k];
        int b = partition.set_of[e.l];
        if (a == b) continue;
        double diff = partition.values[a] - partition.values[b];
        if (diff == 0.0) {
            throw Error(ErrorCode::inconsistent_partition,
                        "edge (" + std::to_string(e.k + 1) + "," + std::to_string(e.l + 1) +
                            ") joins two sets with equal value");
        }
        double term = problem.lambda2() * e.weight * (diff > 0 ? 1.0 : -1.0);
        grad[e.k] += term;
        grad[e.l] -= term;
    }
    return grad;
}

int count_nonzero(const Eigen::VectorXd& beta) {
    return static_cast<int>((beta.array() != 0.0).count());
}

} // namespace fusedlasso
