#include "fusedlasso/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "fusedlasso/error.hpp"

namespace fusedlasso {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::non_finite: return "non_finite";
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::invalid_graph: return "invalid_graph";
        case ErrorCode::inconsistent_partition: return "inconsistent_partition";
        case ErrorCode::invalid_fused_sets: return "invalid_fused_sets";
        case ErrorCode::zero_column: return "zero_column";
        case ErrorCode::tied_times: return "tied_times";
        case ErrorCode::no_events: return "no_events";
        case ErrorCode::unsupported_loss: return "unsupported_loss";
        case ErrorCode::empty_intersection: return "empty_intersection";
    }
    return "unknown";
}

PenaltyGraph::PenaltyGraph(int p, std::vector<double> node_weights, std::vector<Edge> edges)
    : p_(p), node_weights_(std::move(node_weights)), edges_(std::move(edges)) {
    if (p < 0) {
        throw Error(ErrorCode::invalid_graph, "node count must be non-negative");
    }
    if (node_weights_.size() != static_cast<std::size_t>(p)) {
        throw Error(ErrorCode::dimension_mismatch,
                    "node weight count " + std::to_string(node_weights_.size()) +
                        " does not match p = " + std::to_string(p));
    }
    for (int k = 0; k < p; ++k) {
        double w = node_weights_[static_cast<std::size_t>(k)];
        if (!std::isfinite(w) || w <= 0.0) {
            throw Error(ErrorCode::invalid_graph,
                        "node weight w_" + std::to_string(k + 1) + " must be finite and > 0");
        }
    }

    std::set<std::pair<int, int>> seen;
    for (auto& e : edges_) {
        if (e.k < 0 || e.l < 0 || e.k >= p || e.l >= p) {
            throw Error(ErrorCode::invalid_graph, "edge endpoint out of range");
        }
        if (e.k == e.l) {
            throw Error(ErrorCode::invalid_graph,
                        "self loop at node " + std::to_string(e.k + 1));
        }
        if (!std::isfinite(e.weight) || e.weight <= 0.0) {
            throw Error(ErrorCode::invalid_graph,
                        "edge (" + std::to_string(e.k + 1) + "," + std::to_string(e.l + 1) +
                            ") weight must be finite and > 0");
        }
        if (e.k > e.l) std::swap(e.k, e.l);
        if (!seen.emplace(e.k, e.l).second) {
            throw Error(ErrorCode::invalid_graph,
                        "duplicate edge (" + std::to_string(e.k + 1) + "," +
                            std::to_string(e.l + 1) + ")");
        }
    }

    std::vector<int> degree(static_cast<std::size_t>(p), 0);
    for (const auto& e : edges_) {
        ++degree[static_cast<std::size_t>(e.k)];
        ++degree[static_cast<std::size_t>(e.l)];
    }
    offsets_.assign(static_cast<std::size_t>(p) + 1, 0);
    for (int k = 0; k < p; ++k) offsets_[k + 1] = offsets_[k] + degree[k];
    adjacency_.resize(static_cast<std::size_t>(offsets_[p]));
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (int idx = 0; idx < static_cast<int>(edges_.size()); ++idx) {
        const auto& e = edges_[idx];
        adjacency_[fill[e.k]++] = Neighbor{e.l, e.weight, idx};
        adjacency_[fill[e.l]++] = Neighbor{e.k, e.weight, idx};
    }
}

PenaltyGraph::PenaltyGraph(int p, std::vector<Edge> edges)
    : PenaltyGraph(p, std::vector<double>(static_cast<std::size_t>(std::max(p, 0)), 1.0),
                   std::move(edges)) {}

PenaltyGraph PenaltyGraph::chain(int p, double edge_weight) {
    std::vector<Edge> edges;
    for (int k = 0; k + 1 < p; ++k) edges.push_back({k, k + 1, edge_weight});
    return PenaltyGraph(p, std::move(edges));
}

PenaltyGraph PenaltyGraph::grid(int side, double edge_weight) {
    std::vector<Edge> edges;
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            int k = r * side + c;
            if (c + 1 < side) edges.push_back({k, k + 1, edge_weight});
            if (r + 1 < side) edges.push_back({k, k + side, edge_weight});
        }
    }
    return PenaltyGraph(side * side, std::move(edges));
}

PenaltyGraph PenaltyGraph::empty(int p) { return PenaltyGraph(p, {}); }

std::span<const Neighbor> PenaltyGraph::neighbors(int k) const {
    return {adjacency_.data() + offsets_[k], static_cast<std::size_t>(degree(k))};
}

double PenaltyGraph::edge_weight(int k, int l) const {
    for (const auto& nb : neighbors(k)) {
        if (nb.node == l) return nb.weight;
    }
    return 0.0;
}

double PenaltyGraph::total_node_weight() const noexcept {
    return std::accumulate(node_weights_.begin(), node_weights_.end(), 0.0);
}

double PenaltyGraph::total_edge_weight() const noexcept {
    double total = 0.0;
    for (const auto& e : edges_) total += e.weight;
    return total;
}

std::vector<std::vector<int>> PenaltyGraph::components() const {
    std::vector<int> label(static_cast<std::size_t>(p_), -1);
    std::vector<std::vector<int>> out;
    std::vector<int> stack;
    for (int start = 0; start < p_; ++start) {
        if (label[start] >= 0) continue;
        int id = static_cast<int>(out.size());
        out.emplace_back();
        label[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            int k = stack.back();
            stack.pop_back();
            out[id].push_back(k);
            for (const auto& nb : neighbors(k)) {
                if (label[nb.node] < 0) {
                    label[nb.node] = id;
                    stack.push_back(nb.node);
                }
            }
        }
        std::sort(out[id].begin(), out[id].end());
    }
    return out;
}

} // namespace fusedlasso
