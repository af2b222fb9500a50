#include "fusedlasso/path.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include "fusedlasso/error.hpp"
#include "fusedlasso/flow.hpp"
#include "fusedlasso/fusion.hpp"
#include "fusedlasso/verify.hpp"

namespace fusedlasso {

const char* to_string(CellStatus s) noexcept {
    switch (s) {
        case CellStatus::solved: return "solved";
        case CellStatus::not_converged: return "not_converged";
        case CellStatus::skipped: return "skipped";
        case CellStatus::failed: return "failed";
    }
    return "unknown";
}

PathGrid PathGrid::exponential(double lambda1_max, double lambda2_max, int n1, int n2, double ratio) {
    if (n1 < 1 || n2 < 1 || !(ratio > 0.0 && ratio <= 1.0) || !(lambda1_max >= 0.0) ||
        !(lambda2_max >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, "grid needs n >= 1, ratio in (0, 1], maxima >= 0");
    }
    auto axis = [ratio](double top, int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        if (n == 1) {
            v[0] = top;
            return v;
        }
        const double lo = std::log(top * ratio);
        const double step = -std::log(ratio) / (n - 1);
        for (int i = 0; i < n; ++i) v[i] = top > 0.0 ? std::exp(lo + step * i) : 0.0;
        v[n - 1] = top;
        if (top > 0.0) v[0] = top * ratio;
        return v;
    };
    return PathGrid{axis(lambda1_max, n1), axis(lambda2_max, n2)};
}

namespace {

// Squared problem whose behaviour at beta = 0 defines the penalty maxima.
FusedProblem null_model(const FusedProblem& problem) {
    if (problem.loss() == Loss::squared) return problem;
    return glm_working_problem(problem, Eigen::VectorXd::Zero(problem.p()));
}

// Smallest lambda2 for which `set` (value `value`, pulls `grad`) survives the split check.
double stable_lambda2(const FusedProblem& base, const std::vector<int>& set, double value,
                      const Eigen::VectorXd& grad, double rel_tol) {
    const int p = base.p();
    Partition part;
    part.sets = {set};
    part.values = {value};
    part.set_of.assign(static_cast<std::size_t>(p), -1);
    for (int k : set) part.set_of[k] = 0;
    // Nodes outside `set` are never touched by split_set; only set_of of members matters.
    const SplitMode mode = value != 0.0 ? SplitMode::active : SplitMode::inactive;
    auto stable = [&](double l2) {
        return !split_set(base.with_lambdas(0.0, l2), part, 0, mode, grad).split();
    };

    double pull = 0.0;
    for (int k : set) pull = std::max(pull, std::abs(grad[k]));
    if (set.size() < 2 || pull == 0.0 || stable(0.0)) return 0.0;

    double hi = 1.0;
    while (!stable(hi)) hi *= 2.0;
    double lo = hi / 2.0;
    while (stable(lo)) {
        hi = lo;
        lo /= 2.0;
        if (lo < 1e-300) return hi;
    }
    while (hi / lo > rel_tol) {
        double mid = std::sqrt(lo * hi);
        if (stable(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

} // namespace

double lambda1_max(const FusedProblem& problem) {
    FusedProblem q = null_model(problem);
    Eigen::VectorXd score = q.X().transpose() * q.y();
    if (q.has_linear_term()) score += q.linear_term();
    double best = 0.0;
    for (int k = 0; k < q.p(); ++k) best = std::max(best, std::abs(score[k]) / q.graph().node_weight(k));
    return best;
}

double lambda2_max(const FusedProblem& problem, std::vector<std::string>* warnings, double rel_tol) {
    if (!(rel_tol > 1.0)) throw Error(ErrorCode::invalid_argument, "rel_tol must exceed 1");
    FusedProblem q = null_model(problem).with_lambdas(0.0, 0.0);
    const auto components = q.graph().components();
    if (components.size() > 1 && warnings) {
        warnings->push_back("penalty graph has " + std::to_string(components.size()) +
                            " connected components; lambda2_max is the maximum over components");
    }
    // Fully fused fit: one level per component, least squares in those levels.
    const int m = static_cast<int>(components.size());
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(q.n(), m);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
        for (int k : components[i]) {
            Z.col(i) += q.X().col(k);
            if (q.has_linear_term()) c[i] += q.linear_term()[k];
        }
    }
    Eigen::MatrixXd A = Z.transpose() * Z;
    Eigen::VectorXd rhs = Z.transpose() * q.y() + c;
    Eigen::VectorXd level = A.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd beta(q.p());
    for (int i = 0; i < m; ++i) {
        for (int k : components[i]) beta[k] = level[i];
    }
    Eigen::VectorXd grad = data_gradient(q, beta);
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
        best = std::max(best, stable_lambda2(q, components[i], level[i], grad, rel_tol));
    }
    return best;
}

namespace {

void solve_row(const FusedProblem& problem, const PathGrid& grid, const PathOptions& options,
               int i2, int max_nonzero, std::vector<PathCell>& cells) {
    using clock = std::chrono::steady_clock;
    Eigen::VectorXd start = Eigen::VectorXd::Zero(problem.p());
    bool stopped = false;
    for (int i1 = grid.n1() - 1; i1 >= 0; --i1) {
        PathCell& cell = cells[grid.index(i1, i2)];
        cell.i1 = i1;
        cell.i2 = i2;
        cell.lambda1 = grid.lambda1[i1];
        cell.lambda2 = grid.lambda2[i2];
        if (stopped) {
            cell.status = CellStatus::skipped;
            cell.message = "more than " + std::to_string(max_nonzero) + " nonzero coefficients earlier in this row";
            continue;
        }
        try {
            FusedProblem at = problem.with_lambdas(cell.lambda1, cell.lambda2);
            auto t0 = clock::now();
            Solution sol = solve(at, options.solver, options.warm_start ? start : Eigen::VectorXd::Zero(problem.p()),
                                 options.options);
            cell.seconds = std::chrono::duration<double>(clock::now() - t0).count();
            cell.objective = sol.objective;
            cell.nonzeros = count_nonzero(sol.beta);
            cell.status = sol.converged ? CellStatus::solved : CellStatus::not_converged;
            if (options.certify) cell.certificate_residual = certificate_residual(at, sol.beta);
            start = sol.beta;
            cell.beta = std::move(sol.beta);
            if (cell.nonzeros > max_nonzero) stopped = true;
        } catch (const Error& e) {
            cell.status = CellStatus::failed;
            cell.message = e.what();
        }
    }
}

} // namespace

PathResult run_path(const FusedProblem& problem, const PathGrid& grid, const PathOptions& options) {
    if (grid.n1() < 1 || grid.n2() < 1) throw Error(ErrorCode::invalid_argument, "empty grid");
    PathResult out;
    out.grid = grid;
    out.cells.resize(static_cast<std::size_t>(grid.size()));
    const int max_nonzero = options.max_nonzero >= 0 ? options.max_nonzero : 2 * problem.n();

    const int threads = std::clamp(options.threads, 1, grid.n2());
    if (threads == 1) {
        for (int i2 = 0; i2 < grid.n2(); ++i2) solve_row(problem, grid, options, i2, max_nonzero, out.cells);
    } else {
        // Rows are independent; each worker writes only its own rows' cells.
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (int i2 = next++; i2 < grid.n2(); i2 = next++) {
                    solve_row(problem, grid, options, i2, max_nonzero, out.cells);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

} // namespace fusedlasso
