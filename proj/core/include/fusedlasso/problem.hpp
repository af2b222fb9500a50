#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fusedlasso/graph.hpp"

namespace fusedlasso {

struct Partition;

enum class Loss { squared, logistic, cox };

const char* to_string(Loss loss) noexcept;

/// Right-censored survival response. Times must be positive and pairwise distinct.
struct CoxData {
    std::vector<double> time;
    std::vector<int> status; ///< 1 = event, 0 = censored
};

/**
 * A full generalized fused lasso instance:
 *
 *   data(beta) + lambda1 * sum_k w_k |beta_k| + lambda2 * sum_{(k,l) in E} w_kl |beta_k - beta_l|
 *
 * where data() is 0.5 * ||y - X beta||^2 - c^T beta for the squared loss (c is an
 * optional linear term, zero unless the problem was built by an IRWLS step), the
 * negative log-likelihood for logistic regression, or the negative log partial
 * likelihood for the Cox model.
 *
 * The design data is shared between copies, so `with_lambdas` is cheap.
 */
class FusedProblem {
public:
    static FusedProblem squared(Eigen::MatrixXd X, Eigen::VectorXd y, PenaltyGraph graph,
                                double lambda1, double lambda2);

    /// Weighted least squares: rows of X and entries of y are scaled by sqrt(v_i).
    static FusedProblem weighted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& obs_weights, PenaltyGraph graph,
                                 double lambda1, double lambda2);

    /// Squared loss with a linear term: 0.5 * ||y - X beta||^2 - c^T beta.
    static FusedProblem quadratic(Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::VectorXd linear,
                                  PenaltyGraph graph, double lambda1, double lambda2);

    static FusedProblem logistic(Eigen::MatrixXd X, Eigen::VectorXd y, PenaltyGraph graph,
                                 double lambda1, double lambda2);

    static FusedProblem cox(Eigen::MatrixXd X, CoxData response, PenaltyGraph graph,
                            double lambda1, double lambda2);

    FusedProblem with_lambdas(double lambda1, double lambda2) const;

    int n() const noexcept { return static_cast<int>(data_->X.rows()); }
    int p() const noexcept { return static_cast<int>(data_->X.cols()); }
    Loss loss() const noexcept { return data_->loss; }

    const Eigen::MatrixXd& X() const noexcept { return data_->X; }
    const Eigen::VectorXd& y() const noexcept { return data_->y; }
    /// Linear term c of the squared loss; empty when absent.
    const Eigen::VectorXd& linear_term() const noexcept { return data_->linear; }
    bool has_linear_term() const noexcept { return data_->linear.size() > 0; }
    /// (X^T X)_kk, precomputed once.
    const Eigen::VectorXd& column_sq_norms() const noexcept { return data_->col_sq_norms; }
    const PenaltyGraph& graph() const noexcept { return data_->graph; }
    const CoxData& cox_data() const noexcept { return data_->cox; }

    double lambda1() const noexcept { return lambda1_; }
    double lambda2() const noexcept { return lambda2_; }

private:
    struct Data {
        Loss loss = Loss::squared;
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        Eigen::VectorXd linear;
        Eigen::VectorXd col_sq_norms;
        PenaltyGraph graph;
        CoxData cox;
    };

    FusedProblem(std::shared_ptr<const Data> data, double lambda1, double lambda2);
    static std::shared_ptr<const Data> make_data(Loss loss, Eigen::MatrixXd X, Eigen::VectorXd y,
                                                 Eigen::VectorXd linear, PenaltyGraph graph,
                                                 CoxData cox);

    std::shared_ptr<const Data> data_;
    double lambda1_ = 0.0;
    double lambda2_ = 0.0;
};

/// Optimality certificate: subgradient multipliers witnessing 0 in the subdifferential.
struct OptimalityCertificate {
    Eigen::VectorXd s;        ///< per node, in [-1, 1]
    Eigen::VectorXd t;        ///< per edge (k < l order of graph.edges()), t_lk = -t_kl
    double max_residual = 0.0;
};

struct Solution {
    Eigen::VectorXd beta;
    double objective = 0.0;
    long iterations = 0; ///< total coordinate sweeps
    bool converged = true;
    std::optional<OptimalityCertificate> certificate;
};

double penalty_value(const PenaltyGraph& graph, double lambda1, double lambda2,
                     const Eigen::VectorXd& beta);

/// Smooth data term only (no penalties).
double data_loss(const FusedProblem& problem, const Eigen::VectorXd& beta);

/// Full objective g(beta).
double loss_value(const FusedProblem& problem, const Eigen::VectorXd& beta);

/// Gradient of the smooth data term.
Eigen::VectorXd data_gradient(const FusedProblem& problem, const Eigen::VectorXd& beta);

/**
 * Gradient of h: the data term plus the difference penalties on edges that
 * cross between sets of `partition`. Cross-edge signs come from the set values,
 * so equal-within-rounding coefficients never produce spurious sign terms.
 */
Eigen::VectorXd loss_gradient_smooth_part(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                          const Partition& partition);

/// Number of coefficients with beta_k != 0.
int count_nonzero(const Eigen::VectorXd& beta);

} // namespace fusedlasso
