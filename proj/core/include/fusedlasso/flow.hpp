#pragma once

#include <vector>

namespace fusedlasso {

/**
 * Directed network with real capacities. Arcs are stored in pairs: arc a and
 * its reverse a ^ 1, with flow(a ^ 1) == -flow(a) at all times.
 */
class FlowNetwork {
public:
    explicit FlowNetwork(int nodes);

    /// Adds from -> to with `capacity` and the reverse direction with `reverse_capacity`.
    /// Returns the id of the forward arc. Capacities must be finite and >= 0.
    int add_arc(int from, int to, double capacity, double reverse_capacity = 0.0);

    int nodes() const noexcept { return static_cast<int>(out_.size()); }
    int arcs() const noexcept { return static_cast<int>(head_.size()); }
    int head(int a) const { return head_[a]; }
    int tail(int a) const { return head_[a ^ 1]; }
    double capacity(int a) const { return cap_[a]; }
    double flow(int a) const { return flow_[a]; }
    double residual(int a) const { return cap_[a] - flow_[a]; }
    const std::vector<int>& out_arcs(int v) const { return out_[v]; }

    double max_capacity() const noexcept { return max_cap_; }
    /// Residuals at or below this are treated as saturated.
    double epsilon() const noexcept { return 1e-10 * (max_cap_ > 1.0 ? max_cap_ : 1.0); }

    void reset_flow();

private:
    friend double max_flow(FlowNetwork&, int, int);

    std::vector<int> head_;
    std::vector<double> cap_;
    std::vector<double> flow_;
    std::vector<std::vector<int>> out_;
    double max_cap_ = 0.0;
};

/// Highest-label push-relabel with the gap heuristic. Leaves a maximum flow in `net`.
double max_flow(FlowNetwork& net, int source, int sink);

struct ResidualReachability {
    std::vector<int> from_source; ///< reachable from s in the residual graph (s excluded)
    std::vector<int> to_sink;     ///< can reach the sink in the residual graph (sink excluded)
};

ResidualReachability residual_reachability(const FlowNetwork& net, int source, int sink);

} // namespace fusedlasso
