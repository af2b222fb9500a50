#include "fusedlasso/huber.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fusedlasso/error.hpp"
#include "fusedlasso/fusion.hpp"
#include "fusedlasso/partition.hpp"

namespace fusedlasso {

double huber_penalty(double x, double M) {
    double ax = std::abs(x);
    if (ax <= 1.0 / M) return 0.5 * M * x * x;
    return ax - 0.5 / M;
}

double smoothed_objective(const FusedProblem& problem, const Eigen::VectorXd& beta, double M) {
    const auto& graph = problem.graph();
    double value = data_loss(problem, beta) + penalty_value(graph, problem.lambda1(), 0.0, beta);
    double fusion = 0.0;
    for (const auto& e : graph.edges()) fusion += e.weight * huber_penalty(beta[e.k] - beta[e.l], M);
    return value + problem.lambda2() * fusion;
}

namespace {

void check_config(const HuberConfig& c) {
    if (!(c.M > 0.0) || c.K < 1 || !(c.epsilon > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "HuberConfig needs M > 0, K >= 1, epsilon > 0");
    }
}

struct Term {
    double at;     // neighbour value
    double weight; // lambda2 * w_kl
};

// Derivative of 0.5 a (x - center)^2 + sum weight * p_M(x - at), continuous and increasing.
double smooth_slope(double x, double a, double center, const std::vector<Term>& terms, double M) {
    double s = a * (x - center);
    for (const auto& t : terms) s += t.weight * std::clamp(M * (x - t.at), -1.0, 1.0);
    return s;
}

// Root of smooth_slope(x) + shift on [lo, +inf) (or (-inf, hi] when going left),
// exact because the function is linear between the knots at +-1/M around each term.
double piecewise_root(double a, double center, const std::vector<Term>& terms, double M,
                      double shift, double start, bool rightward) {
    std::vector<double> knots;
    knots.reserve(2 * terms.size());
    for (const auto& t : terms) {
        for (double k : {t.at - 1.0 / M, t.at + 1.0 / M}) {
            if (rightward ? k > start : k < start) knots.push_back(k);
        }
    }
    if (rightward) std::sort(knots.begin(), knots.end());
    else std::sort(knots.begin(), knots.end(), std::greater<>());

    auto f = [&](double x) { return smooth_slope(x, a, center, terms, M) + shift; };
    double prev = start;
    double fprev = f(prev);
    for (double k : knots) {
        double fk = f(k);
        bool crossed = rightward ? fk >= 0.0 : fk <= 0.0;
        if (crossed) {
            if (fk == fprev) return k;
            return prev + (k - prev) * (0.0 - fprev) / (fk - fprev);
        }
        prev = k;
        fprev = fk;
    }
    // Past every knot all clamps are saturated, so the slope is exactly a.
    return prev - fprev / a;
}

class HuberState {
public:
    HuberState(const FusedProblem& problem, const Eigen::VectorXd& beta, double M)
        : problem_(problem), M_(M), beta_(beta), residual_(problem.y() - problem.X() * beta) {}

    double argmin(int k) {
        const double a = problem_.column_sq_norms()[k];
        if (!(a > 0.0)) {
            throw Error(ErrorCode::zero_column,
                        "column " + std::to_string(k + 1) + " of the design matrix is zero");
        }
        double grad = problem_.X().col(k).dot(residual_);
        if (problem_.has_linear_term()) grad += problem_.linear_term()[k];
        const double center = beta_[k] + grad / a;

        terms_.clear();
        if (problem_.lambda2() > 0.0) {
            for (const auto& nb : problem_.graph().neighbors(k)) {
                terms_.push_back({beta_[nb.node], problem_.lambda2() * nb.weight});
            }
        }
        const double l1 = problem_.lambda1() * problem_.graph().node_weight(k);
        double at_zero = smooth_slope(0.0, a, center, terms_, M_);
        if (at_zero + l1 < 0.0) return piecewise_root(a, center, terms_, M_, l1, 0.0, true);
        if (at_zero - l1 > 0.0) return piecewise_root(a, center, terms_, M_, -l1, 0.0, false);
        return 0.0;
    }

    void set(int k, double value) {
        double delta = value - beta_[k];
        if (delta == 0.0) return;
        residual_.noalias() -= delta * problem_.X().col(k);
        beta_[k] = value;
    }

    const Eigen::VectorXd& beta() const { return beta_; }

private:
    const FusedProblem& problem_;
    double M_;
    Eigen::VectorXd beta_;
    Eigen::VectorXd residual_;
    std::vector<Term> terms_;
};

void require_squared(const FusedProblem& problem, const Eigen::VectorXd& beta) {
    if (problem.loss() != Loss::squared) {
        throw Error(ErrorCode::unsupported_loss, "the Huber solver needs the squared loss");
    }
    if (beta.size() != problem.p()) {
        throw Error(ErrorCode::dimension_mismatch, "beta length must equal p");
    }
}

} // namespace

double huber_coordinate_minimize(const FusedProblem& problem, const Eigen::VectorXd& beta, int k,
                                 double M) {
    require_squared(problem, beta);
    if (k < 0 || k >= problem.p()) throw Error(ErrorCode::invalid_argument, "coordinate index out of range");
    HuberState state(problem, beta, M);
    return state.argmin(k);
}

namespace {

Eigen::VectorXd run_sweeps(const FusedProblem& problem, const Eigen::VectorXd& beta,
                           const HuberConfig& config, long& sweeps) {
    HuberState state(problem, beta, config.M);
    for (int sweep = 0; sweep < config.K; ++sweep) {
        ++sweeps;
        double max_change = 0.0;
        for (int k = 0; k < problem.p(); ++k) {
            double to = state.argmin(k);
            max_change = std::max(max_change, std::abs(to - state.beta()[k]));
            state.set(k, to);
        }
        if (max_change < 1e-12) break;
    }
    return state.beta();
}

} // namespace

Eigen::VectorXd huber_cd_sweeps(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                const HuberConfig& config) {
    require_squared(problem, beta);
    check_config(config);
    long sweeps = 0;
    return run_sweeps(problem, beta, config, sweeps);
}

Solution solve_huber(const FusedProblem& problem, const Eigen::VectorXd& beta0,
                     const HuberConfig& config) {
    require_squared(problem, beta0);
    check_config(config);
    const int p = problem.p();
    const int max_rounds = config.max_rounds > 0 ? config.max_rounds : std::max(10 * p, 10);

    std::vector<std::vector<int>> working(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) working[k] = {k};
    Eigen::VectorXd beta = beta0;
    Eigen::VectorXd saved;
    Eigen::VectorXd best;
    double best_objective = 0.0;

    Solution out;
    bool converged = false;
    bool inner_ok = true;
    for (int round = 1; round <= max_rounds; ++round) {
        CollapsedProblem cp = collapse(problem, working);
        Solution inner = minimize_on_sets(problem, cp, beta, config.cd, config.polish);
        out.iterations += inner.iterations;
        inner_ok = inner.converged;
        Partition part = build_partition(problem.graph(), inner.beta);
        beta = snap_to_partition(inner.beta, part);

        double objective = loss_value(problem, beta);
        if (best.size() == 0 || objective < best_objective) {
            best = beta;
            best_objective = objective;
        }
        if (part.sets != working) {
            working = std::move(part.sets);
            continue;
        }
        // Stuck: stop if the last un-stick attempt led back to the same point.
        if (saved.size() != 0 && (beta - saved).lpNorm<1>() < config.epsilon) {
            converged = true;
            break;
        }
        saved = beta;
        beta = run_sweeps(problem, beta, config, out.iterations);
        Partition after = build_partition(problem.graph(), beta);
        beta = snap_to_partition(beta, after);
        working = std::move(after.sets);
    }

    out.beta = best;
    out.objective = best_objective;
    out.converged = converged && inner_ok;
    return out;
}

} // namespace fusedlasso
