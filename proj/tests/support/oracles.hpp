#pragma once

// Reference computations for tests. None of these call into the solver code
// paths they are used to check.

#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <fusedlasso/graph.hpp>

namespace fusedlasso::testing {

using Rng = std::mt19937_64;

/// Unpenalized logistic regression by full Newton with step halving.
Eigen::VectorXd newton_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Cox log partial likelihood by direct O(n^2) risk-set sums (distinct times).
double cox_loglik_direct(const Eigen::MatrixXd& X, const std::vector<double>& time,
                         const std::vector<int>& status, const Eigen::VectorXd& beta);

/// Central finite differences of f at x.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6);

struct Arc {
    int from;
    int to;
    double capacity;
};

/// Minimum s-t cut by enumerating every node subset (nodes <= 20).
double min_cut_enumerate(int nodes, const std::vector<Arc>& arcs, int source, int sink);

/// Random spanning tree on p nodes plus extra random edges, at most max_edges in total.
PenaltyGraph random_connected_graph(Rng& rng, int p, int max_edges, bool random_weights = false);

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols);
Eigen::VectorXd random_vector(Rng& rng, int size, double scale = 1.0);

int uniform_int(Rng& rng, int lo, int hi);
double uniform_real(Rng& rng, double lo, double hi);

template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(items.size()) - 1))];
}

} // namespace fusedlasso::testing
