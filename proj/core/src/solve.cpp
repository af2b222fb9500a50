#include "fusedlasso/solve.hpp"

#include "fusedlasso/error.hpp"

namespace fusedlasso {

const char* to_string(SolverKind kind) noexcept {
    switch (kind) {
        case SolverKind::exact: return "exact";
        case SolverKind::naive: return "naive";
        case SolverKind::huber: return "huber";
    }
    return "unknown";
}

std::optional<SolverKind> parse_solver(std::string_view name) {
    if (name == "exact") return SolverKind::exact;
    if (name == "naive") return SolverKind::naive;
    if (name == "huber") return SolverKind::huber;
    return std::nullopt;
}

std::optional<Loss> parse_loss(std::string_view name) {
    if (name == "squared") return Loss::squared;
    if (name == "logistic") return Loss::logistic;
    if (name == "cox") return Loss::cox;
    return std::nullopt;
}

Solution solve_squared(const FusedProblem& problem, SolverKind kind, const Eigen::VectorXd& beta0,
                       const SolverOptions& options) {
    switch (kind) {
        case SolverKind::exact: return solve_exact(problem, beta0, options.exact);
        case SolverKind::naive: return naive_cd(problem, beta0, options.naive);
        case SolverKind::huber: return solve_huber(problem, beta0, options.huber);
    }
    throw Error(ErrorCode::invalid_argument, "unknown solver");
}

Solution solve(const FusedProblem& problem, SolverKind kind, const Eigen::VectorXd& beta0,
               const SolverOptions& options) {
    if (problem.loss() == Loss::squared) return solve_squared(problem, kind, beta0, options);
    return fit_glm(problem, kind, beta0, options);
}

} // namespace fusedlasso
