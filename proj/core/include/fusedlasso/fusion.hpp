#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fusedlasso/coordinate.hpp"
#include "fusedlasso/partition.hpp"
#include "fusedlasso/problem.hpp"

namespace fusedlasso {

/// Where a working fused set came from.
enum class Provenance { whole, positive, negative, zero };

const char* to_string(Provenance p) noexcept;

struct FusedSets {
    std::vector<std::vector<int>> sets;
    std::vector<Provenance> provenance;
};

/**
 * The problem restricted to beta constant on each fused set: one variable per
 * set, whose design column is the sum of the member columns. Node weights and
 * cross-set edge weights are summed; intra-set edges disappear.
 */
struct CollapsedProblem {
    FusedProblem problem;
    std::vector<std::vector<int>> sets;
    std::vector<int> fused_index; ///< original node -> collapsed variable

    /// One value per set (0 if any member is exactly 0, else the smallest member's value).
    Eigen::VectorXd collapse_beta(const Eigen::VectorXd& beta) const;
    Eigen::VectorXd expand(const Eigen::VectorXd& collapsed) const;
};

/// Throws invalid_fused_sets when sets overlap, miss a node or are disconnected in the graph.
CollapsedProblem collapse(const FusedProblem& problem, const std::vector<std::vector<int>>& sets);

enum class SplitMode { active, inactive };

struct SplitResult {
    std::vector<std::vector<int>> pieces; ///< connected components, canonical order
    std::vector<Provenance> provenance;
    double flow_value = 0.0;
    double unsaturated_source = 0.0; ///< source capacity left after max flow
    double unsaturated_sink = 0.0;   ///< sink capacity left after max flow
    bool split() const { return pieces.size() > 1 || (!provenance.empty() && provenance[0] != Provenance::whole); }
};

/// Default threshold (relative to 1 + largest capacity) below which leftover
/// source or sink capacity is treated as saturation noise.
inline constexpr double kSplitTolerance = 1e-8;

/**
 * Max-flow stability check of set `set_index` of `partition`.
 *
 * `gradient` is dh/dbeta at beta given the partition (see loss_gradient_smooth_part).
 * Active mode requires a nonzero set value, inactive mode a zero one.
 */
SplitResult split_set(const FusedProblem& problem, const Partition& partition, int set_index,
                      SplitMode mode, const Eigen::VectorXd& gradient,
                      double split_tol = kSplitTolerance);

SplitResult split_set(const FusedProblem& problem, const Eigen::VectorXd& beta,
                      const Partition& partition, int set_index, SplitMode mode,
                      double split_tol = kSplitTolerance);

enum class ScheduleRule { fuse, split_active, split_inactive };

const char* to_string(ScheduleRule r) noexcept;

struct RoundInfo {
    int round = 0;
    ScheduleRule rule = ScheduleRule::fuse; ///< rule that produced this round's working sets
    int working_sets = 0;
    int partition_sets = 0;
    double objective_before = 0.0;
    double objective_after = 0.0;
    double max_change = 0.0;
};

struct ExactConfig {
    CdConfig cd = [] {
        CdConfig c;
        c.tol = 1e-10;
        return c;
    }();
    int max_rounds = 0; ///< 0 means 10 * p
    double split_tol = kSplitTolerance;
    bool polish = true; ///< accelerate each collapsed solve with polish_on_face
    std::function<void(const RoundInfo&)> on_round;
};

/// Coordinate descent with grouping: fuse, split active, split inactive, until stable.
Solution solve_exact(const FusedProblem& problem, const Eigen::VectorXd& beta0,
                     const ExactConfig& config = {});

/// Sets of `partition` with every set selected by `mode` replaced by its split pieces.
FusedSets refine_partition(const FusedProblem& problem, const Partition& partition,
                           const Eigen::VectorXd& gradient, SplitMode mode,
                           double split_tol = kSplitTolerance);

struct FaceStep {
    Eigen::VectorXd beta;
    bool complete = false; ///< reached the face minimizer rather than a face boundary
};

/**
 * Step toward the minimizer of g over the face fixed by beta's partition: zero
 * sets stay zero, nonzero sets keep their sign, and adjacent set values keep
 * their order. On that face g is a quadratic in the set values; the step goes
 * to its minimizer nearest beta, or stops where it first reaches the face
 * boundary, pinning the constraint it hits. Returns nothing unless g strictly
 * decreases.
 */
std::optional<FaceStep> polish_on_face(const FusedProblem& problem, const Eigen::VectorXd& beta);

/**
 * Minimizes g over beta constant on each set of `cp`, starting from `beta`
 * (a full-length vector). Coordinate descent on the collapsed problem,
 * accelerated by polish_on_face when `polish` is set. Returns the expanded
 * minimizer; converged reports whether the collapsed problem met cd.tol.
 */
Solution minimize_on_sets(const FusedProblem& problem, const CollapsedProblem& cp,
                          const Eigen::VectorXd& beta, const CdConfig& cd, bool polish = true);

/// Copy of beta with every member of a partition set set to that set's value.
Eigen::VectorXd snap_to_partition(const Eigen::VectorXd& beta, const Partition& partition);

} // namespace fusedlasso
