#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fusedlasso/problem.hpp"

namespace fusedlasso {

/// A kink of a one-dimensional piecewise-linear penalty: weight * |x - at|.
struct Knot {
    double at;
    double weight;
};

/**
 * Exact minimizer of 0.5 * a * (x - center)^2 + sum_i knots[i].weight * |x - knots[i].at|.
 *
 * Requires a > 0 and non-negative weights. Knots are sorted and coincident
 * ones merged in place. When the minimum sits on a kink, that kink's location
 * is returned bit for bit, which is what lets neighbours fuse exactly.
 */
double minimize_piecewise(double a, double center, std::vector<Knot>& knots);

struct CoordinateMove {
    int index;
    double from;
    double to;
};

struct CdConfig {
    double tol = 1e-8;        ///< max absolute coordinate change per sweep
    long max_sweeps = 100000; ///< cap on inner sweeps
    bool use_active_set = true;
    /// Called after every coordinate update that changes a value; receives beta after the move.
    std::function<void(const CoordinateMove&, const Eigen::VectorXd&)> on_move;
};

/// Exact minimizer of g over beta_k with all other coordinates fixed (squared loss only).
double coordinate_minimize(const FusedProblem& problem, const Eigen::VectorXd& beta, int k);

/**
 * Naive coordinate descent with an active set: sweeps over the active set in
 * ascending index order until no coordinate moves by tol, then admits zero
 * coordinates whose one-dimensional minimizer is nonzero, until the active
 * set is stable.
 */
Solution naive_cd(const FusedProblem& problem, const Eigen::VectorXd& beta0,
                  const CdConfig& config = {});

} // namespace fusedlasso
