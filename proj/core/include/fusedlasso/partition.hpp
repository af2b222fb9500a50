#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fusedlasso/graph.hpp"

namespace fusedlasso {

/// Relative tolerance under which two adjacent coefficients count as equal.
inline constexpr double kEqualityTolerance = 1e-9;

inline bool nearly_equal(double a, double b) {
    double d = a - b;
    if (d < 0) d = -d;
    double m = a < 0 ? -a : a;
    return d <= kEqualityTolerance * (1.0 + m);
}

/**
 * The maximal fused sets of a coefficient vector: connected components of the
 * graph after deleting every edge whose endpoints have different values.
 *
 * Sets are sorted ascending and ordered by their smallest member. Each set
 * carries one shared value: 0 if any member is exactly zero, otherwise the value
 * of its smallest member.
 */
struct Partition {
    std::vector<std::vector<int>> sets;
    std::vector<double> values;
    std::vector<int> set_of; ///< node -> set index

    int size() const noexcept { return static_cast<int>(sets.size()); }
    bool same_sets(const Partition& other) const { return sets == other.sets; }
};

Partition build_partition(const PenaltyGraph& graph, const Eigen::VectorXd& beta);

/// Partition induced by explicit node sets (validated: disjoint, covering).
Partition partition_from_sets(int p, std::vector<std::vector<int>> sets,
                              const Eigen::VectorXd& beta);

/// Canonical ordering: members ascending, sets by smallest member.
void canonicalize(std::vector<std::vector<int>>& sets);

/// Connected components of `nodes` in the graph restricted to `nodes`.
std::vector<std::vector<int>> induced_components(const PenaltyGraph& graph,
                                                 const std::vector<int>& nodes);

} // namespace fusedlasso
