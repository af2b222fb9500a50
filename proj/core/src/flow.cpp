#include "fusedlasso/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "fusedlasso/error.hpp"

namespace fusedlasso {

FlowNetwork::FlowNetwork(int nodes) {
    if (nodes < 2) throw Error(ErrorCode::invalid_argument, "flow network needs at least 2 nodes");
    out_.resize(static_cast<std::size_t>(nodes));
}

int FlowNetwork::add_arc(int from, int to, double capacity, double reverse_capacity) {
    if (from < 0 || to < 0 || from >= nodes() || to >= nodes() || from == to) {
        throw Error(ErrorCode::invalid_argument, "flow arc endpoints invalid");
    }
    if (!std::isfinite(capacity) || !std::isfinite(reverse_capacity) || capacity < 0.0 ||
        reverse_capacity < 0.0) {
        throw Error(ErrorCode::invalid_argument, "flow capacities must be finite and >= 0");
    }
    int id = arcs();
    head_.push_back(to);
    cap_.push_back(capacity);
    flow_.push_back(0.0);
    out_[from].push_back(id);
    head_.push_back(from);
    cap_.push_back(reverse_capacity);
    flow_.push_back(0.0);
    out_[to].push_back(id + 1);
    max_cap_ = std::max({max_cap_, capacity, reverse_capacity});
    return id;
}

void FlowNetwork::reset_flow() { std::fill(flow_.begin(), flow_.end(), 0.0); }

double max_flow(FlowNetwork& net, int source, int sink) {
    const int n = net.nodes();
    if (source < 0 || sink < 0 || source >= n || sink >= n || source == sink) {
        throw Error(ErrorCode::invalid_argument, "invalid source/sink");
    }
    net.reset_flow();
    const double eps = net.epsilon();

    std::vector<int> height(static_cast<std::size_t>(n), 0);
    std::vector<double> excess(static_cast<std::size_t>(n), 0.0);
    std::vector<std::size_t> current(static_cast<std::size_t>(n), 0);
    std::vector<int> count(static_cast<std::size_t>(2 * n + 2), 0);
    std::vector<std::vector<int>> bucket(static_cast<std::size_t>(2 * n + 2));
    int top = 0;

    auto activate = [&](int v) {
        if (v == source || v == sink) return;
        bucket[height[v]].push_back(v);
        top = std::max(top, height[v]);
    };
    auto push = [&](int a, double amount) {
        net.flow_[a] += amount;
        net.flow_[a ^ 1] -= amount;
        int from = net.head_[a ^ 1];
        int to = net.head_[a];
        bool was_inactive = excess[to] <= eps;
        excess[from] -= amount;
        excess[to] += amount;
        if (was_inactive && excess[to] > eps) activate(to);
    };

    height[source] = n;
    for (int v = 0; v < n; ++v) ++count[height[v]];
    for (int a : net.out_[source]) {
        if (net.cap_[a] > eps) push(a, net.cap_[a]);
    }

    while (top >= 0) {
        if (bucket[top].empty()) {
            --top;
            continue;
        }
        int v = bucket[top].back();
        bucket[top].pop_back();
        if (height[v] != top || excess[v] <= eps) continue;

        const auto& arcs = net.out_[v];
        while (excess[v] > eps) {
            if (current[v] == arcs.size()) {
                // Relabel.
                int old = height[v];
                int best = 2 * n + 1;
                for (int a : arcs) {
                    if (net.cap_[a] - net.flow_[a] > eps) best = std::min(best, height[net.head_[a]] + 1);
                }
                --count[old];
                if (count[old] == 0 && old < n) {
                    // Gap: nothing at or above `old` (below n) can reach the sink any more.
                    for (int u = 0; u < n; ++u) {
                        if (u != source && height[u] > old && height[u] < n) {
                            --count[height[u]];
                            height[u] = n + 1;
                            ++count[height[u]];
                            if (excess[u] > eps) activate(u);
                        }
                    }
                    best = std::max(best, n + 1);
                }
                height[v] = std::min(best, 2 * n + 1);
                ++count[height[v]];
                current[v] = 0;
                if (height[v] >= 2 * n + 1) break; // isolated; cannot happen with a residual path back to s
                continue;
            }
            int a = arcs[current[v]];
            int w = net.head_[a];
            double res = net.cap_[a] - net.flow_[a];
            if (res > eps && height[v] == height[w] + 1) {
                push(a, std::min(excess[v], res));
            } else {
                ++current[v];
            }
        }
        if (excess[v] > eps && height[v] < 2 * n + 1) activate(v);
    }
    return excess[sink];
}

ResidualReachability residual_reachability(const FlowNetwork& net, int source, int sink) {
    const int n = net.nodes();
    const double eps = net.epsilon();
    ResidualReachability out;

    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<int> queue{source};
    seen[source] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int a : net.out_arcs(v)) {
            int w = net.head(a);
            if (!seen[w] && net.residual(a) > eps) {
                seen[w] = 1;
                queue.push_back(w);
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (seen[v] && v != source && v != sink) out.from_source.push_back(v);
    }

    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(1, sink);
    seen[sink] = 1;
    while (!queue.empty()) {
        int w = queue.front();
        queue.pop_front();
        for (int a : net.out_arcs(w)) {
            int u = net.head(a);
            // Arc a ^ 1 runs u -> w.
            if (!seen[u] && net.residual(a ^ 1) > eps) {
                seen[u] = 1;
                queue.push_back(u);
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (seen[v] && v != source && v != sink) out.to_sink.push_back(v);
    }
    return out;
}

} // namespace fusedlasso
