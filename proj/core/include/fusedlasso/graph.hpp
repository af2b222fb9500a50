#pragma once

#include <span>
#include <vector>

namespace fusedlasso {

/// Undirected penalty edge between coefficients k < l (0-based).
struct Edge {
    int k;
    int l;
    double weight;
};

/// One direction of an undirected edge as seen from a node's adjacency list.
struct Neighbor {
    int node;
    double weight;
    int edge; ///< index into PenaltyGraph::edges()
};

/**
 * Weighted undirected graph over the coefficient indices 0..p-1.
 *
 * Holds the lasso weights w_k (one per node) and the fusion weights w_kl
 * (one per edge). Adjacency is stored in compressed form so that every
 * undirected edge appears exactly once in each endpoint's neighbor list.
 * Immutable after construction.
 */
class PenaltyGraph {
public:
    PenaltyGraph() = default;

    /// Validates: weights finite and > 0, endpoints in range, no self loops,
    /// no duplicate edges. Edges are normalised to k < l and kept in input order.
    PenaltyGraph(int p, std::vector<double> node_weights, std::vector<Edge> edges);

    /// Unit node weights.
    PenaltyGraph(int p, std::vector<Edge> edges);

    static PenaltyGraph chain(int p, double edge_weight = 1.0);
    /// side x side 4-neighbour grid, node index = row * side + col.
    static PenaltyGraph grid(int side, double edge_weight = 1.0);
    static PenaltyGraph empty(int p);

    int size() const noexcept { return p_; }
    double node_weight(int k) const { return node_weights_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& node_weights() const noexcept { return node_weights_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::span<const Neighbor> neighbors(int k) const;
    int degree(int k) const { return offsets_[k + 1] - offsets_[k]; }

    /// Weight of edge (k, l), or 0 when absent. O(degree).
    double edge_weight(int k, int l) const;

    double total_node_weight() const noexcept;
    double total_edge_weight() const noexcept;

    /// Connected components (each sorted ascending, ordered by smallest member).
    std::vector<std::vector<int>> components() const;
    bool connected() const { return components().size() <= 1; }

private:
    int p_ = 0;
    std::vector<double> node_weights_;
    std::vector<Edge> edges_;
    std::vector<int> offsets_{0};
    std::vector<Neighbor> adjacency_;
};

} // namespace fusedlasso
