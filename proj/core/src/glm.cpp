#include "fusedlasso/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fusedlasso/error.hpp"
#include "fusedlasso/solve.hpp"

namespace fusedlasso {

double logistic_negative_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = X * beta;
    double total = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double e = eta[i];
        double softplus = std::max(e, 0.0) + std::log1p(std::exp(-std::abs(e)));
        total += softplus - y[i] * e;
    }
    return total;
}

WorkingResponse logistic_working_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const Eigen::VectorXd& beta, double prob_clamp) {
    if (!(prob_clamp > 0.0 && prob_clamp < 0.5)) {
        throw Error(ErrorCode::invalid_argument, "prob_clamp must lie in (0, 0.5)");
    }
    Eigen::VectorXd eta = X * beta;
    WorkingResponse out{Eigen::VectorXd(eta.size()), Eigen::VectorXd(eta.size())};
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double prob = 1.0 / (1.0 + std::exp(-eta[i]));
        prob = std::clamp(prob, prob_clamp, 1.0 - prob_clamp);
        double v = prob * (1.0 - prob);
        out.v[i] = v;
        out.z[i] = eta[i] + (y[i] - prob) / v;
    }
    return out;
}

void validate_cox_data(const CoxData& data, int n) {
    if (static_cast<int>(data.time.size()) != n || static_cast<int>(data.status.size()) != n) {
        throw Error(ErrorCode::dimension_mismatch,
                    "survival times and status must both have length n = " + std::to_string(n));
    }
    bool any_event = false;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(data.time[i]) || data.time[i] <= 0.0) {
            throw Error(ErrorCode::invalid_argument,
                        "survival time " + std::to_string(i + 1) + " must be finite and > 0");
        }
        if (data.status[i] != 0 && data.status[i] != 1) {
            throw Error(ErrorCode::invalid_argument,
                        "status " + std::to_string(i + 1) + " must be 0 or 1");
        }
        any_event = any_event || data.status[i] == 1;
    }
    if (!any_event) throw Error(ErrorCode::no_events, "all observations are censored");
    std::vector<double> sorted = data.time;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::tied_times, "survival times must be distinct (ties are not supported)");
    }
}

namespace {

// Risk-set sums for distinct times. With observations ordered by decreasing
// time, the risk set of each is a prefix of that order.
struct CoxSums {
    std::vector<int> by_time_desc;
    Eigen::VectorXd rel;    // exp(eta - shift)
    Eigen::VectorXd denom;  // sum over the risk set of rel
    double shift = 0.0;
    Eigen::VectorXd eta;
};

CoxSums cox_sums(const Eigen::MatrixXd& X, const CoxData& data, const Eigen::VectorXd& beta) {
    const int n = static_cast<int>(X.rows());
    CoxSums s;
    s.eta = X * beta;
    s.shift = n > 0 ? s.eta.maxCoeff() : 0.0;
    s.rel = (s.eta.array() - s.shift).exp();
    s.by_time_desc.resize(static_cast<std::size_t>(n));
    std::iota(s.by_time_desc.begin(), s.by_time_desc.end(), 0);
    std::sort(s.by_time_desc.begin(), s.by_time_desc.end(),
              [&](int a, int b) { return data.time[a] > data.time[b]; });
    s.denom.resize(n);
    double running = 0.0;
    for (int i : s.by_time_desc) {
        running += s.rel[i];
        s.denom[i] = running;
    }
    return s;
}

// Derivative of log L with respect to eta, and the diagonal of its negated Hessian.
void cox_eta_terms(const CoxData& data, const CoxSums& s, Eigen::VectorXd& grad,
                   Eigen::VectorXd* weights) {
    const Eigen::Index n = s.rel.size();
    grad.resize(n);
    if (weights) weights->resize(n);
    double c1 = 0.0, c2 = 0.0;
    // Ascending time: accumulate 1/S_i over events at or before t_k.
    for (auto it = s.by_time_desc.rbegin(); it != s.by_time_desc.rend(); ++it) {
        int k = *it;
        if (data.status[k] == 1) {
            c1 += 1.0 / s.denom[k];
            c2 += 1.0 / (s.denom[k] * s.denom[k]);
        }
        grad[k] = data.status[k] - s.rel[k] * c1;
        if (weights) (*weights)[k] = s.rel[k] * c1 - s.rel[k] * s.rel[k] * c2;
    }
}

} // namespace

double cox_log_partial_likelihood(const Eigen::MatrixXd& X, const CoxData& data,
                                  const Eigen::VectorXd& beta) {
    CoxSums s = cox_sums(X, data, beta);
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.eta.size(); ++i) {
        if (data.status[i] == 1) total += s.eta[i] - s.shift - std::log(s.denom[i]);
    }
    return total;
}

Eigen::VectorXd cox_gradient(const Eigen::MatrixXd& X, const CoxData& data,
                             const Eigen::VectorXd& beta) {
    CoxSums s = cox_sums(X, data, beta);
    Eigen::VectorXd g;
    cox_eta_terms(data, s, g, nullptr);
    return X.transpose() * g;
}

CoxQuadratic cox_quadratic(const Eigen::MatrixXd& X, const CoxData& data,
                           const Eigen::VectorXd& beta) {
    validate_cox_data(data, static_cast<int>(X.rows()));
    CoxSums s = cox_sums(X, data, beta);
    const Eigen::Index p = X.cols();
    CoxQuadratic out;
    Eigen::VectorXd g;
    cox_eta_terms(data, s, g, &out.weights);
    out.gradient = X.transpose() * g;

    // Exact information diagonal: sum over events of the risk-set variance of x_j.
    out.hessian_diag = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd first = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd second = Eigen::VectorXd::Zero(p);
    for (int i : s.by_time_desc) {
        first += s.rel[i] * X.row(i).transpose();
        second += s.rel[i] * X.row(i).transpose().cwiseAbs2();
        if (data.status[i] == 1) {
            Eigen::VectorXd mean = first / s.denom[i];
            out.hessian_diag += second / s.denom[i] - mean.cwiseAbs2();
        }
    }

    Eigen::VectorXd base = (X.array().square().colwise() * out.weights.array()).colwise().sum().transpose();
    out.scale.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double h = std::max(out.hessian_diag[j], 0.0);
        out.scale[j] = base[j] > 0.0 ? std::sqrt(h / base[j]) : 1.0;
    }
    out.approx_diag = base.cwiseProduct(out.scale.cwiseAbs2());
    return out;
}

FusedProblem glm_working_problem(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                 const IrwlsConfig& config) {
    if (beta.size() != problem.p()) {
        throw Error(ErrorCode::dimension_mismatch, "beta length must equal p");
    }
    switch (problem.loss()) {
        case Loss::squared:
            return problem;
        case Loss::logistic: {
            WorkingResponse w = logistic_working_response(problem.X(), problem.y(), beta,
                                                          config.prob_clamp);
            return FusedProblem::weighted(problem.X(), w.z, w.v, problem.graph(), problem.lambda1(),
                                          problem.lambda2());
        }
        case Loss::cox: {
            // -log L(b) ~ const - d'(b - beta) + 0.5 (b - beta)' Qt (b - beta), Qt = D X'WX D,
            // written as 0.5 ||Xt beta - Xt b||^2 - d'b with Xt = W^(1/2) X D.
            CoxQuadratic q = cox_quadratic(problem.X(), problem.cox_data(), beta);
            Eigen::VectorXd root = q.weights.cwiseMax(0.0).cwiseSqrt();
            Eigen::MatrixXd Xt = root.asDiagonal() * problem.X() * q.scale.asDiagonal();
            Eigen::VectorXd yt = Xt * beta;
            return FusedProblem::quadratic(std::move(Xt), std::move(yt), std::move(q.gradient),
                                           problem.graph(), problem.lambda1(), problem.lambda2());
        }
    }
    throw Error(ErrorCode::unsupported_loss, "unknown loss");
}

Solution fit_glm(const FusedProblem& problem, SolverKind solver, const Eigen::VectorXd& beta0,
                 const SolverOptions& options) {
    const IrwlsConfig& config = options.irwls;
    if (config.max_outer < 1 || !(config.tol > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "IrwlsConfig needs max_outer >= 1 and tol > 0");
    }
    if (problem.loss() == Loss::squared) return solve_squared(problem, solver, beta0, options);
    if (beta0.size() != problem.p()) {
        throw Error(ErrorCode::dimension_mismatch, "beta0 length must equal p");
    }

    Solution out;
    out.beta = beta0;
    out.objective = loss_value(problem, beta0);
    out.converged = false;
    for (int outer = 0; outer < config.max_outer; ++outer) {
        FusedProblem working = glm_working_problem(problem, out.beta, config);
        Solution inner = solve_squared(working, solver, out.beta, options);
        out.iterations += inner.iterations;
        double objective = loss_value(problem, inner.beta);
        double scale = std::max(1.0, std::abs(out.objective));
        if (objective > out.objective) {
            // Keep the last accepted iterate. A rise below tol is solver noise at
            // convergence; anything larger means the quadratic model overshot.
            out.converged = (objective - out.objective) / scale < config.tol;
            break;
        }
        double rel = (out.objective - objective) / scale;
        out.beta = std::move(inner.beta);
        out.objective = objective;
        if (rel < config.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

} // namespace fusedlasso
