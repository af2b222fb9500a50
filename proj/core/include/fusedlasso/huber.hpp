#pragma once

#include <Eigen/Dense>

#include "fusedlasso/coordinate.hpp"
#include "fusedlasso/problem.hpp"

namespace fusedlasso {

struct HuberConfig {
    double M = 1000.0;     ///< smoothing parameter, knot at 1/M
    int K = 100;           ///< max smoothed sweeps per un-stick attempt
    double epsilon = 1e-6; ///< L1 change of the stuck point that ends the solve
    CdConfig cd;
    bool polish = true;    ///< accelerate collapsed solves (see minimize_on_sets)
    int max_rounds = 0;    ///< 0 means 10 * p
};

/// p_M(x) = (M/2) x^2 for |x| <= 1/M, |x| - 1/(2M) otherwise.
double huber_penalty(double x, double M);

/// g_M: the objective with every difference penalty replaced by its Huber version.
double smoothed_objective(const FusedProblem& problem, const Eigen::VectorXd& beta, double M);

/// Exact minimizer of g_M over beta_k with the rest fixed.
double huber_coordinate_minimize(const FusedProblem& problem, const Eigen::VectorXd& beta, int k,
                                 double M);

/// At most config.K full sweeps of coordinate descent on g_M (stops early once nothing moves).
Eigen::VectorXd huber_cd_sweeps(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                const HuberConfig& config = {});

/**
 * Grouped coordinate descent that escapes stuck points with smoothed sweeps on
 * the uncollapsed problem. Returns the best iterate by the exact objective; no
 * global optimality guarantee.
 */
Solution solve_huber(const FusedProblem& problem, const Eigen::VectorXd& beta0,
                     const HuberConfig& config = {});

} // namespace fusedlasso
