#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fusedlasso/partition.hpp"
#include "fusedlasso/path.hpp"
#include "fusedlasso/problem.hpp"

namespace fusedlasso {

/// Error of a candidate against a reference coefficient vector.
struct ErrMetrics {
    double l1_mean = 0.0; ///< ||d||_1 / p
    double rmse = 0.0;    ///< sqrt(||d||_2^2 / p)
    double linf = 0.0;    ///< max |d_i|
};

ErrMetrics error_metrics(const Eigen::VectorXd& reference, const Eigen::VectorXd& candidate);

struct ErrReport {
    ErrMetrics worst;           ///< each metric maximised separately over the compared cells
    int cells_compared = 0;
    std::vector<std::optional<ErrMetrics>> per_cell; ///< grid order; empty where either path lacks beta
};

/// Worst-case error over the cells solved in both paths. Grids must match.
ErrReport accuracy_report(const PathResult& reference, const PathResult& candidate);

enum class ViolationKind { coordinate_move, active_split, inactive_split, stationarity };

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::vector<int> nodes; ///< members of the offending set (0-based)
    double magnitude = 0.0; ///< coordinate move, leftover capacity, or residual
};

struct OptimalityReport {
    bool optimal = false;
    OptimalityCertificate certificate;
    std::vector<Violation> violations;
};

/**
 * Subgradient multipliers (s, t) for beta given dh/dbeta. Within each fused set
 * the edge multipliers come from a feasible flow whose node balances match the
 * data pulls; across sets they are the signs of the value differences.
 * max_residual is recomputed from `data_grad` and the multipliers alone.
 */
OptimalityCertificate build_certificate(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                        const Partition& partition,
                                        const Eigen::VectorXd& data_grad);

/// Squared loss: coordinate moves on the collapsed problem, both split modes on
/// every set, and the stationarity certificate. All violations are reported.
OptimalityReport check_optimality(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                  double tol = 1e-6);

/// Central-difference gradient of the smooth data term.
Eigen::VectorXd numeric_gradient(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                 double step = 1e-6);

/// Any loss: certificate residual against a numeric gradient of the data term.
OptimalityReport check_optimality_numeric(const FusedProblem& problem,
                                          const Eigen::VectorXd& beta, double tol = 1e-4,
                                          double step = 1e-6);

/// Stationarity residual of the certificate at beta: flow-based for the squared
/// loss, numeric-gradient based otherwise.
double certificate_residual(const FusedProblem& problem, const Eigen::VectorXd& beta);

struct OracleResult {
    Eigen::VectorXd beta;
    double objective = 0.0;          ///< exact g at beta
    double smoothed_objective = 0.0; ///< fully smoothed objective at beta
    double certified_gap = 0.0;      ///< upper bound on objective - g*
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Reference minimizer built independently of the coordinate/flow code: every
 * absolute value (lasso and fusion) is replaced by a Huber function, and the
 * smooth problem is solved by damped Newton with continuation in M.
 */
OracleResult smoothed_oracle(const FusedProblem& problem, double M = 1e8, double grad_tol = 1e-10);

} // namespace fusedlasso
