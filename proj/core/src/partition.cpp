#include "fusedlasso/partition.hpp"

#include <algorithm>
#include <string>

#include "fusedlasso/error.hpp"

namespace fusedlasso {

void canonicalize(std::vector<std::vector<int>>& sets) {
    for (auto& s : sets) std::sort(s.begin(), s.end());
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        if (a.empty() || b.empty()) return a.size() < b.size();
        return a.front() < b.front();
    });
}

namespace {

double set_value(const std::vector<int>& set, const Eigen::VectorXd& beta) {
    for (int k : set) {
        if (beta[k] == 0.0) return 0.0;
    }
    return beta[set.front()];
}

} // namespace

Partition build_partition(const PenaltyGraph& graph, const Eigen::VectorXd& beta) {
    const int p = graph.size();
    if (beta.size() != p) {
        throw Error(ErrorCode::dimension_mismatch,
                    "beta has length " + std::to_string(beta.size()) + ", expected " +
                        std::to_string(p));
    }
    Partition out;
    out.set_of.assign(static_cast<std::size_t>(p), -1);
    std::vector<int> stack;
    for (int start = 0; start < p; ++start) {
        if (out.set_of[start] >= 0) continue;
        int id = out.size();
        out.sets.emplace_back();
        out.set_of[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            int k = stack.back();
            stack.pop_back();
            out.sets[id].push_back(k);
            for (const auto& nb : graph.neighbors(k)) {
                if (out.set_of[nb.node] < 0 && nearly_equal(beta[k], beta[nb.node])) {
                    out.set_of[nb.node] = id;
                    stack.push_back(nb.node);
                }
            }
        }
        std::sort(out.sets[id].begin(), out.sets[id].end());
    }
    out.values.reserve(out.sets.size());
    for (const auto& s : out.sets) out.values.push_back(set_value(s, beta));
    return out;
}

Partition partition_from_sets(int p, std::vector<std::vector<int>> sets,
                              const Eigen::VectorXd& beta) {
    canonicalize(sets);
    Partition out;
    out.set_of.assign(static_cast<std::size_t>(p), -1);
    for (int i = 0; i < static_cast<int>(sets.size()); ++i) {
        if (sets[i].empty()) {
            throw Error(ErrorCode::invalid_fused_sets, "empty fused set");
        }
        for (int k : sets[i]) {
            if (k < 0 || k >= p) {
                throw Error(ErrorCode::invalid_fused_sets, "fused set member out of range");
            }
            if (out.set_of[k] >= 0) {
                throw Error(ErrorCode::invalid_fused_sets,
                            "node " + std::to_string(k + 1) + " appears in two fused sets");
            }
            out.set_of[k] = i;
        }
    }
    for (int k = 0; k < p; ++k) {
        if (out.set_of[k] < 0) {
            throw Error(ErrorCode::invalid_fused_sets,
                        "node " + std::to_string(k + 1) + " is not covered by any fused set");
        }
    }
    out.sets = std::move(sets);
    for (const auto& s : out.sets) out.values.push_back(set_value(s, beta));
    return out;
}

std::vector<std::vector<int>> induced_components(const PenaltyGraph& graph,
                                                 const std::vector<int>& nodes) {
    std::vector<int> label(static_cast<std::size_t>(graph.size()), -2);
    for (int k : nodes) label[k] = -1;
    std::vector<std::vector<int>> out;
    std::vector<int> stack;
    for (int start : nodes) {
        if (label[start] != -1) continue;
        int id = static_cast<int>(out.size());
        out.emplace_back();
        label[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            int k = stack.back();
            stack.pop_back();
            out[id].push_back(k);
            for (const auto& nb : graph.neighbors(k)) {
                if (label[nb.node] == -1) {
                    label[nb.node] = id;
                    stack.push_back(nb.node);
                }
            }
        }
    }
    canonicalize(out);
    return out;
}

} // namespace fusedlasso
