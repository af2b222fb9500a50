#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fusedlasso/problem.hpp"
#include "fusedlasso/solve.hpp"

namespace fusedlasso {

/// Penalty grid; both value lists ascending.
struct PathGrid {
    std::vector<double> lambda1;
    std::vector<double> lambda2;

    /// n points from max * ratio up to max, equally spaced on a log scale.
    static PathGrid exponential(double lambda1_max, double lambda2_max, int n1 = 50, int n2 = 20,
                                double ratio = 1e-4);

    int n1() const noexcept { return static_cast<int>(lambda1.size()); }
    int n2() const noexcept { return static_cast<int>(lambda2.size()); }
    int size() const noexcept { return n1() * n2(); }
    int index(int i1, int i2) const noexcept { return i2 * n1() + i1; }
};

enum class CellStatus { solved, not_converged, skipped, failed };

const char* to_string(CellStatus s) noexcept;

struct PathCell {
    int i1 = 0;
    int i2 = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::optional<Eigen::VectorXd> beta; ///< absent when skipped or failed
    double objective = 0.0;
    double certificate_residual = 0.0;
    double seconds = 0.0;
    int nonzeros = 0;
    CellStatus status = CellStatus::skipped;
    std::string message;
};

struct PathResult {
    PathGrid grid;
    std::vector<PathCell> cells; ///< grid.index(i1, i2) order
    std::vector<std::string> warnings;

    const PathCell& cell(int i1, int i2) const { return cells[grid.index(i1, i2)]; }
};

/// max_k |x_k^T y + c_k| / w_k of the squared problem (GLMs: their quadratic model at 0).
double lambda1_max(const FusedProblem& problem);

/**
 * Smallest lambda2 at which, with lambda1 = 0, the fully fused fit is stable
 * under the active split check, bracketed by geometric bisection to
 * hi / lo <= rel_tol. On a disconnected graph each component is checked
 * separately, the maximum returned, and a warning appended.
 */
double lambda2_max(const FusedProblem& problem, std::vector<std::string>* warnings = nullptr,
                   double rel_tol = 1.01);

struct PathOptions {
    SolverKind solver = SolverKind::exact;
    SolverOptions options;
    int threads = 1;          ///< rows run concurrently; each row cold-starts from zero
    bool warm_start = true;   ///< within a row, start each cell from the previous one
    bool certify = true;      ///< compute the certificate residual per cell
    int max_nonzero = -1;     ///< stop rule threshold; -1 means 2 n
};

PathResult run_path(const FusedProblem& problem, const PathGrid& grid, const PathOptions& options = {});

} // namespace fusedlasso
