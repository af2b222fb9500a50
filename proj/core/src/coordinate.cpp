#include "fusedlasso/coordinate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fusedlasso/error.hpp"

namespace fusedlasso {

double minimize_piecewise(double a, double center, std::vector<Knot>& knots) {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(center)) {
        throw Error(ErrorCode::invalid_argument, "piecewise minimizer needs finite a > 0");
    }
    for (const auto& k : knots) {
        if (!(k.weight >= 0.0) || !std::isfinite(k.at) || !std::isfinite(k.weight)) {
            throw Error(ErrorCode::invalid_argument, "knot weights must be finite and >= 0");
        }
    }
    std::sort(knots.begin(), knots.end(), [](const Knot& x, const Knot& y) { return x.at < y.at; });
    std::size_t m = 0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (knots[i].weight <= 0.0) continue;
        if (m > 0 && knots[m - 1].at == knots[i].at) {
            knots[m - 1].weight += knots[i].weight;
        } else {
            knots[m++] = knots[i];
        }
    }
    knots.resize(m);
    if (m == 0) return center;

    // prefix[j] = total weight of knots strictly left of knot j.
    std::vector<double> prefix(m + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = prefix[j] + knots[j].weight;
    const double total = prefix[m];

    auto right_slope = [&](std::size_t j) {
        return a * (knots[j].at - center) + prefix[j + 1] - (total - prefix[j + 1]);
    };
    // First knot whose right derivative is >= 0.
    std::size_t lo = 0, hi = m;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (right_slope(mid) >= 0.0) hi = mid;
        else lo = mid + 1;
    }
    if (lo == m) return center - total / a;
    double left_slope = a * (knots[lo].at - center) + prefix[lo] - (total - prefix[lo]);
    if (left_slope <= 0.0) return knots[lo].at;
    double x = center - (prefix[lo] - (total - prefix[lo])) / a;
    // Guard against rounding pushing the root across the bracketing knots.
    if (x > knots[lo].at) x = knots[lo].at;
    if (lo > 0 && x < knots[lo - 1].at) x = knots[lo - 1].at;
    return x;
}

namespace {

void require_squared(const FusedProblem& problem) {
    if (problem.loss() != Loss::squared) {
        throw Error(ErrorCode::unsupported_loss,
                    std::string("coordinate descent needs the squared loss, got ") +
                        to_string(problem.loss()));
    }
}

// Solver-owned state: beta plus the running residual r = y - X beta.
class CdState {
public:
    CdState(const FusedProblem& problem, const Eigen::VectorXd& beta0)
        : problem_(problem), beta_(beta0), residual_(problem.y() - problem.X() * beta0) {
        knots_.reserve(8);
    }

    double argmin(int k) {
        const double a = problem_.column_sq_norms()[k];
        if (!(a > 0.0)) {
            throw Error(ErrorCode::zero_column,
                        "column " + std::to_string(k + 1) + " of the design matrix is zero");
        }
        double grad = problem_.X().col(k).dot(residual_);
        if (problem_.has_linear_term()) grad += problem_.linear_term()[k];
        const double center = beta_[k] + grad / a;

        knots_.clear();
        const auto& graph = problem_.graph();
        if (problem_.lambda1() > 0.0) knots_.push_back({0.0, problem_.lambda1() * graph.node_weight(k)});
        if (problem_.lambda2() > 0.0) {
            for (const auto& nb : graph.neighbors(k)) {
                knots_.push_back({beta_[nb.node], problem_.lambda2() * nb.weight});
            }
        }
        return minimize_piecewise(a, center, knots_);
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
    Eigen::VectorXd beta_;
    Eigen::VectorXd residual_;
    std::vector<Knot> knots_;
};

} // namespace

double coordinate_minimize(const FusedProblem& problem, const Eigen::VectorXd& beta, int k) {
    require_squared(problem);
    if (beta.size() != problem.p()) {
        throw Error(ErrorCode::dimension_mismatch, "beta length must equal p");
    }
    if (k < 0 || k >= problem.p()) {
        throw Error(ErrorCode::invalid_argument, "coordinate index out of range");
    }
    CdState state(problem, beta);
    return state.argmin(k);
}

Solution naive_cd(const FusedProblem& problem, const Eigen::VectorXd& beta0, const CdConfig& config) {
    require_squared(problem);
    if (beta0.size() != problem.p()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "beta0 has length " + std::to_string(beta0.size()) + ", expected p = " +
                        std::to_string(problem.p()));
    }
    if (!(config.tol > 0.0) || config.max_sweeps < 1) {
        throw Error(ErrorCode::invalid_argument, "CdConfig needs tol > 0 and max_sweeps >= 1");
    }
    const int p = problem.p();
    CdState state(problem, beta0);

    std::vector<char> in_active(static_cast<std::size_t>(p), 0);
    std::vector<int> active;
    for (int k = 0; k < p; ++k) {
        if (!config.use_active_set || beta0[k] != 0.0) {
            in_active[k] = 1;
            active.push_back(k);
        }
    }

    auto move = [&](int k, double to) {
        double from = state.beta()[k];
        if (to == from) return 0.0;
        state.set(k, to);
        if (config.on_move) config.on_move(CoordinateMove{k, from, to}, state.beta());
        return std::abs(to - from);
    };

    Solution out;
    bool converged = false;
    while (true) {
        bool inner_done = false;
        while (out.iterations < config.max_sweeps) {
            ++out.iterations;
            double max_change = 0.0;
            for (int k : active) max_change = std::max(max_change, move(k, state.argmin(k)));
            if (max_change < config.tol) {
                inner_done = true;
                break;
            }
        }
        if (!inner_done) break;
        if (!config.use_active_set) {
            converged = true;
            break;
        }
        bool grew = false;
        for (int k = 0; k < p; ++k) {
            if (in_active[k] || state.beta()[k] != 0.0) continue;
            if (state.argmin(k) != 0.0) {
                in_active[k] = 1;
                grew = true;
            }
        }
        if (!grew) {
            converged = true;
            break;
        }
        active.clear();
        for (int k = 0; k < p; ++k) {
            if (in_active[k]) active.push_back(k);
        }
    }

    out.beta = state.beta();
    out.objective = loss_value(problem, out.beta);
    out.converged = converged;
    return out;
}

} // namespace fusedlasso
