#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "fusedlasso/coordinate.hpp"
#include "fusedlasso/fusion.hpp"
#include "fusedlasso/glm.hpp"
#include "fusedlasso/huber.hpp"
#include "fusedlasso/problem.hpp"

namespace fusedlasso {

enum class SolverKind : int { exact, naive, huber };

const char* to_string(SolverKind kind) noexcept;
std::optional<SolverKind> parse_solver(std::string_view name);
std::optional<Loss> parse_loss(std::string_view name);

struct SolverOptions {
    CdConfig naive;
    ExactConfig exact;
    HuberConfig huber;
    IrwlsConfig irwls;
};

/// Runs one solver on a squared-loss problem.
Solution solve_squared(const FusedProblem& problem, SolverKind kind, const Eigen::VectorXd& beta0,
                       const SolverOptions& options = {});

/// Any loss: squared problems go straight to the solver, GLMs through IRWLS.
Solution solve(const FusedProblem& problem, SolverKind kind, const Eigen::VectorXd& beta0,
               const SolverOptions& options = {});

} // namespace fusedlasso
