#pragma once

#include <Eigen/Dense>

#include "fusedlasso/problem.hpp"

namespace fusedlasso {

enum class SolverKind : int;
struct SolverOptions;

struct IrwlsConfig {
    int max_outer = 50;
    double tol = 1e-8;        ///< relative change of the penalized negative log-likelihood
    double prob_clamp = 1e-5; ///< probabilities clamped to [c, 1 - c]
};

struct WorkingResponse {
    Eigen::VectorXd z; ///< linearization targets
    Eigen::VectorXd v; ///< per-observation curvature weights
};

double logistic_negative_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& beta);

WorkingResponse logistic_working_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                          const Eigen::VectorXd& beta, double prob_clamp = 1e-5);

/// Throws tied_times / no_events / invalid_argument / dimension_mismatch.
void validate_cox_data(const CoxData& data, int n);

double cox_log_partial_likelihood(const Eigen::MatrixXd& X, const CoxData& data,
                                  const Eigen::VectorXd& beta);

/// Gradient of the log partial likelihood.
Eigen::VectorXd cox_gradient(const Eigen::MatrixXd& X, const CoxData& data,
                             const Eigen::VectorXd& beta);

/// Quadratic model of the negative log partial likelihood at beta.
struct CoxQuadratic {
    Eigen::VectorXd gradient;     ///< d = grad log L
    Eigen::VectorXd hessian_diag; ///< diagonal of the exact information matrix Q
    Eigen::VectorXd weights;      ///< diagonal of W (per observation)
    Eigen::VectorXd scale;        ///< D, so that diag(D X^T W X D) = diag(Q)
    Eigen::VectorXd approx_diag;  ///< diag(D X^T W X D)
};

CoxQuadratic cox_quadratic(const Eigen::MatrixXd& X, const CoxData& data,
                           const Eigen::VectorXd& beta);

/// Squared-loss problem in beta whose smooth part is the quadratic model of the GLM loss at beta.
FusedProblem glm_working_problem(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                 const IrwlsConfig& config = {});

/// IRWLS: repeated quadratic approximation solved by the chosen squared-loss solver.
Solution fit_glm(const FusedProblem& problem, SolverKind solver, const Eigen::VectorXd& beta0,
                 const SolverOptions& options);

} // namespace fusedlasso
