#include "fusedlasso/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "fusedlasso/error.hpp"
#include "fusedlasso/flow.hpp"

namespace fusedlasso {

const char* to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::whole: return "whole";
        case Provenance::positive: return "positive";
        case Provenance::negative: return "negative";
        case Provenance::zero: return "zero";
    }
    return "unknown";
}

const char* to_string(ScheduleRule r) noexcept {
    switch (r) {
        case ScheduleRule::fuse: return "fuse";
        case ScheduleRule::split_active: return "split_active";
        case ScheduleRule::split_inactive: return "split_inactive";
    }
    return "unknown";
}

Eigen::VectorXd CollapsedProblem::collapse_beta(const Eigen::VectorXd& beta) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(sets.size()));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        double v = beta[sets[i].front()];
        for (int k : sets[i]) {
            if (beta[k] == 0.0) {
                v = 0.0;
                break;
            }
        }
        out[static_cast<Eigen::Index>(i)] = v;
    }
    return out;
}

Eigen::VectorXd CollapsedProblem::expand(const Eigen::VectorXd& collapsed) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(fused_index.size()));
    for (std::size_t k = 0; k < fused_index.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = collapsed[fused_index[k]];
    }
    return out;
}

CollapsedProblem collapse(const FusedProblem& problem, const std::vector<std::vector<int>>& sets) {
    if (problem.loss() != Loss::squared) {
        throw Error(ErrorCode::unsupported_loss, "collapse needs the squared loss");
    }
    const int p = problem.p();
    const auto& graph = problem.graph();
    Partition layout = partition_from_sets(p, sets, Eigen::VectorXd::Zero(p));
    for (const auto& s : layout.sets) {
        if (s.size() > 1 && induced_components(graph, s).size() != 1) {
            throw Error(ErrorCode::invalid_fused_sets,
                        "fused set containing node " + std::to_string(s.front() + 1) +
                            " is not connected in the penalty graph");
        }
    }
    const int m = layout.size();

    Eigen::MatrixXd Xt = Eigen::MatrixXd::Zero(problem.n(), m);
    std::vector<double> wt(static_cast<std::size_t>(m), 0.0);
    Eigen::VectorXd ct;
    if (problem.has_linear_term()) ct = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < p; ++k) {
        int i = layout.set_of[k];
        Xt.col(i) += problem.X().col(k);
        wt[i] += graph.node_weight(k);
        if (problem.has_linear_term()) ct[i] += problem.linear_term()[k];
    }

    std::vector<std::tuple<int, int, double>> cross;
    for (const auto& e : graph.edges()) {
        int a = layout.set_of[e.k];
        int b = layout.set_of[e.l];
        if (a == b) continue;
        cross.emplace_back(std::min(a, b), std::max(a, b), e.weight);
    }
    std::sort(cross.begin(), cross.end());
    std::vector<Edge> edges;
    for (const auto& [a, b, w] : cross) {
        if (!edges.empty() && edges.back().k == a && edges.back().l == b) {
            edges.back().weight += w;
        } else {
            edges.push_back({a, b, w});
        }
    }

    PenaltyGraph g(m, std::move(wt), std::move(edges));
    FusedProblem collapsed =
        problem.has_linear_term()
            ? FusedProblem::quadratic(std::move(Xt), problem.y(), std::move(ct), std::move(g),
                                      problem.lambda1(), problem.lambda2())
            : FusedProblem::squared(std::move(Xt), problem.y(), std::move(g), problem.lambda1(),
                                    problem.lambda2());
    return CollapsedProblem{std::move(collapsed), std::move(layout.sets), std::move(layout.set_of)};
}

namespace {

struct PullNetwork {
    FlowNetwork net;
    int source;
    int sink;
    double source_total = 0.0;
    double sink_total = 0.0;
};

// Flow network over one set: internal arcs carry lambda2 * w_kl both ways,
// negative pulls feed from the source, positive pulls drain into the sink.
PullNetwork build_network(const FusedProblem& problem, const std::vector<int>& members,
                          const std::vector<int>& local, const std::vector<double>& pull) {
    const int m = static_cast<int>(members.size());
    PullNetwork out{FlowNetwork(m + 2), m, m + 1};
    const double l2 = problem.lambda2();
    for (int i = 0; i < m; ++i) {
        int k = members[i];
        if (l2 > 0.0) {
            for (const auto& nb : problem.graph().neighbors(k)) {
                int j = local[nb.node];
                if (j > i) out.net.add_arc(i, j, l2 * nb.weight, l2 * nb.weight);
            }
        }
        if (pull[i] < 0.0) {
            out.net.add_arc(out.source, i, -pull[i]);
            out.source_total += -pull[i];
        } else if (pull[i] > 0.0) {
            out.net.add_arc(i, out.sink, pull[i]);
            out.sink_total += pull[i];
        }
    }
    return out;
}

void append_components(const PenaltyGraph& graph, const std::vector<int>& nodes, Provenance tag,
                       SplitResult& out) {
    if (nodes.empty()) return;
    for (auto& c : induced_components(graph, nodes)) {
        out.pieces.push_back(std::move(c));
        out.provenance.push_back(tag);
    }
}

void sort_pieces(std::vector<std::vector<int>>& pieces, std::vector<Provenance>& provenance) {
    std::vector<std::size_t> order(pieces.size());
    std::iota(order.begin(), order.end(), 0);
    for (auto& p : pieces) std::sort(p.begin(), p.end());
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pieces[a].front() < pieces[b].front(); });
    std::vector<std::vector<int>> ps;
    std::vector<Provenance> pv;
    ps.reserve(pieces.size());
    pv.reserve(pieces.size());
    for (auto i : order) {
        ps.push_back(std::move(pieces[i]));
        pv.push_back(provenance[i]);
    }
    pieces = std::move(ps);
    provenance = std::move(pv);
}

std::vector<int> to_global(const std::vector<int>& local_nodes, const std::vector<int>& members) {
    std::vector<int> out;
    out.reserve(local_nodes.size());
    for (int v : local_nodes) out.push_back(members[v]);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

SplitResult split_set(const FusedProblem& problem, const Partition& partition, int set_index,
                      SplitMode mode, const Eigen::VectorXd& gradient, double split_tol) {
    if (set_index < 0 || set_index >= partition.size()) {
        throw Error(ErrorCode::invalid_argument, "set index out of range");
    }
    if (gradient.size() != problem.p()) {
        throw Error(ErrorCode::dimension_mismatch, "gradient length must equal p");
    }
    const auto& members = partition.sets[set_index];
    const double value = partition.values[set_index];
    if (mode == SplitMode::active && value == 0.0) {
        throw Error(ErrorCode::invalid_argument, "active split requested on a set with value 0");
    }
    if (mode == SplitMode::inactive && value != 0.0) {
        throw Error(ErrorCode::invalid_argument, "inactive split requested on a set with nonzero value");
    }

    const auto& graph = problem.graph();
    const int m = static_cast<int>(members.size());
    std::vector<int> local(static_cast<std::size_t>(problem.p()), -1);
    for (int i = 0; i < m; ++i) local[members[i]] = i;

    auto pulls = [&](double sign) {
        std::vector<double> pull(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            int k = members[i];
            pull[i] = gradient[k] + sign * problem.lambda1() * graph.node_weight(k);
        }
        return pull;
    };

    SplitResult out;
    std::vector<int> plus, minus;
    if (mode == SplitMode::active) {
        PullNetwork pn = build_network(problem, members, local, pulls(value > 0 ? 1.0 : -1.0));
        out.flow_value = max_flow(pn.net, pn.source, pn.sink);
        out.unsaturated_source = std::max(0.0, pn.source_total - out.flow_value);
        out.unsaturated_sink = std::max(0.0, pn.sink_total - out.flow_value);
        const double thr = split_tol * (1.0 + pn.net.max_capacity());
        auto reach = residual_reachability(pn.net, pn.source, pn.sink);
        if (out.unsaturated_source > thr) plus = to_global(reach.from_source, members);
        if (out.unsaturated_sink > thr) minus = to_global(reach.to_sink, members);
    } else {
        PullNetwork up = build_network(problem, members, local, pulls(1.0));
        PullNetwork down = build_network(problem, members, local, pulls(-1.0));
        double f_up = max_flow(up.net, up.source, up.sink);
        double f_down = max_flow(down.net, down.source, down.sink);
        out.flow_value = f_up;
        out.unsaturated_source = std::max(0.0, up.source_total - f_up);
        out.unsaturated_sink = std::max(0.0, down.sink_total - f_down);
        if (out.unsaturated_source > split_tol * (1.0 + up.net.max_capacity())) {
            plus = to_global(residual_reachability(up.net, up.source, up.sink).from_source, members);
        }
        if (out.unsaturated_sink > split_tol * (1.0 + down.net.max_capacity())) {
            minus = to_global(residual_reachability(down.net, down.source, down.sink).to_sink, members);
        }
    }

    if (plus.empty() && minus.empty()) {
        out.pieces.push_back(members);
        out.provenance.push_back(Provenance::whole);
        return out;
    }
    // The positive side takes precedence if rounding lets a node land on both.
    std::vector<int> minus_only, rest;
    std::set_difference(minus.begin(), minus.end(), plus.begin(), plus.end(),
                        std::back_inserter(minus_only));
    std::vector<int> moved;
    std::set_union(plus.begin(), plus.end(), minus_only.begin(), minus_only.end(),
                   std::back_inserter(moved));
    std::set_difference(members.begin(), members.end(), moved.begin(), moved.end(),
                        std::back_inserter(rest));
    append_components(graph, plus, Provenance::positive, out);
    append_components(graph, minus_only, Provenance::negative, out);
    append_components(graph, rest, Provenance::zero, out);
    sort_pieces(out.pieces, out.provenance);
    return out;
}

SplitResult split_set(const FusedProblem& problem, const Eigen::VectorXd& beta,
                      const Partition& partition, int set_index, SplitMode mode, double split_tol) {
    Eigen::VectorXd grad = loss_gradient_smooth_part(problem, beta, partition);
    return split_set(problem, partition, set_index, mode, grad, split_tol);
}

FusedSets refine_partition(const FusedProblem& problem, const Partition& partition,
                           const Eigen::VectorXd& gradient, SplitMode mode, double split_tol) {
    FusedSets out;
    for (int i = 0; i < partition.size(); ++i) {
        bool selected = (mode == SplitMode::active) == (partition.values[i] != 0.0);
        if (!selected || partition.sets[i].size() == 1) {
            out.sets.push_back(partition.sets[i]);
            out.provenance.push_back(Provenance::whole);
            continue;
        }
        SplitResult r = split_set(problem, partition, i, mode, gradient, split_tol);
        for (std::size_t j = 0; j < r.pieces.size(); ++j) {
            out.sets.push_back(std::move(r.pieces[j]));
            out.provenance.push_back(r.provenance[j]);
        }
    }
    sort_pieces(out.sets, out.provenance);
    return out;
}

Eigen::VectorXd snap_to_partition(const Eigen::VectorXd& beta, const Partition& partition) {
    Eigen::VectorXd out = beta;
    for (int i = 0; i < partition.size(); ++i) {
        for (int k : partition.sets[i]) out[k] = partition.values[i];
    }
    return out;
}

std::optional<FaceStep> polish_on_face(const FusedProblem& problem, const Eigen::VectorXd& beta) {
    if (problem.loss() != Loss::squared) return std::nullopt;
    const auto& graph = problem.graph();
    Partition part = build_partition(graph, beta);
    Eigen::VectorXd start = snap_to_partition(beta, part);

    std::vector<int> var(static_cast<std::size_t>(part.size()), -1);
    std::vector<int> set_of_var;
    for (int i = 0; i < part.size(); ++i) {
        if (part.values[i] != 0.0) {
            var[i] = static_cast<int>(set_of_var.size());
            set_of_var.push_back(i);
        }
    }
    const int m = static_cast<int>(set_of_var.size());
    if (m == 0) return std::nullopt;

    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(problem.n(), m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd u(m);
    for (int j = 0; j < m; ++j) u[j] = part.values[set_of_var[j]];
    for (int k = 0; k < problem.p(); ++k) {
        int i = part.set_of[k];
        if (var[i] < 0) continue;
        Z.col(var[i]) += problem.X().col(k);
        double s = part.values[i] > 0.0 ? 1.0 : -1.0;
        rhs[var[i]] -= problem.lambda1() * graph.node_weight(k) * s;
        if (problem.has_linear_term()) rhs[var[i]] += problem.linear_term()[k];
    }
    struct Cross {
        int a, b; // set indices, values[a] > values[b] on the face
    };
    std::vector<Cross> cross;
    for (const auto& e : graph.edges()) {
        int a = part.set_of[e.k], b = part.set_of[e.l];
        if (a == b) continue;
        if (part.values[a] < part.values[b]) std::swap(a, b);
        double term = problem.lambda2() * e.weight;
        if (var[a] >= 0) rhs[var[a]] -= term;
        if (var[b] >= 0) rhs[var[b]] += term;
        cross.push_back({a, b});
    }
    // Gradient of the face quadratic at u is G u - rhs; step to its nearest minimizer.
    Eigen::VectorXd r = Z.transpose() * problem.y() + rhs - Z.transpose() * (Z * u);
    Eigen::MatrixXd G = Z.transpose() * Z;
    Eigen::VectorXd d = G.completeOrthogonalDecomposition().solve(r);
    if (!d.allFinite()) return std::nullopt;
    // When r leaves the range of G the quadratic is unbounded below on the face;
    // the leftover r - G d spans a null direction along which g falls linearly.
    Eigen::VectorXd leftover = r - G * d;
    const bool bounded = leftover.norm() <= 1e-10 * (1.0 + r.norm());
    if (!bounded) d = leftover;
    if (d.cwiseAbs().maxCoeff() == 0.0) return std::nullopt;

    // Largest step keeping signs and adjacent orders; the first constraint hit is pinned.
    auto val = [&](int set, double t) { return var[set] < 0 ? 0.0 : u[var[set]] + t * d[var[set]]; };
    auto slope = [&](int set) { return var[set] < 0 ? 0.0 : d[var[set]]; };
    double t = bounded ? 1.0 : std::numeric_limits<double>::infinity();
    int hit_zero = -1;
    const Cross* hit_pair = nullptr;
    for (int j = 0; j < m; ++j) {
        if (u[j] * d[j] < 0.0) {
            double tj = -u[j] / d[j];
            if (tj < t) {
                t = tj;
                hit_zero = j;
                hit_pair = nullptr;
            }
        }
    }
    for (const auto& c : cross) {
        double gap = val(c.a, 0.0) - val(c.b, 0.0);
        double rate = slope(c.a) - slope(c.b);
        if (rate < 0.0 && -gap / rate < t) {
            t = -gap / rate;
            hit_pair = &c;
            hit_zero = -1;
        }
    }
    if (t <= 0.0 || !std::isfinite(t)) return std::nullopt;

    Eigen::VectorXd v = u + t * d;
    if (hit_zero >= 0) v[hit_zero] = 0.0;
    std::vector<double> value(static_cast<std::size_t>(part.size()), 0.0);
    for (int j = 0; j < m; ++j) value[set_of_var[j]] = v[j];
    if (hit_pair) {
        // Pin the lower set onto the upper one; a zero set cannot move.
        if (var[hit_pair->b] >= 0) value[hit_pair->b] = value[hit_pair->a];
        else value[hit_pair->a] = 0.0;
    }
    Eigen::VectorXd out(problem.p());
    for (int k = 0; k < problem.p(); ++k) out[k] = value[part.set_of[k]];
    if (!(loss_value(problem, out) < loss_value(problem, start))) return std::nullopt;
    return FaceStep{std::move(out), hit_zero < 0 && hit_pair == nullptr};
}

namespace {
constexpr double kCoarseTolerance = 1e-7;
constexpr int kMaxPolishAttempts = 20;
constexpr long kConfirmSweeps = 100;
} // namespace

Solution minimize_on_sets(const FusedProblem& problem, const CollapsedProblem& cp,
                          const Eigen::VectorXd& beta, const CdConfig& cd, bool polish) {
    // Coarse descent usually finds the face and the polish then lands on its
    // minimizer. A step stopped at the face boundary just resumes descent; a
    // rejected polish falls back to descent at the full tolerance.
    Solution out;
    Eigen::VectorXd inner = cp.collapse_beta(beta);
    bool done = false;
    if (polish) {
        CdConfig coarse = cd;
        coarse.tol = std::max(cd.tol, kCoarseTolerance);
        for (int attempt = 0; attempt < kMaxPolishAttempts && !done; ++attempt) {
            Solution step = naive_cd(cp.problem, inner, coarse);
            out.iterations += step.iterations;
            inner = step.beta;
            auto face = polish_on_face(problem, cp.expand(inner));
            if (!face) break;
            inner = cp.collapse_beta(face->beta);
            if (!face->complete) continue;
            // The face minimizer holds zero sets fixed; confirm at full tolerance
            // that none of them wants to move.
            CdConfig confirm = cd;
            confirm.max_sweeps = std::min(cd.max_sweeps, kConfirmSweeps);
            Solution check = naive_cd(cp.problem, inner, confirm);
            out.iterations += check.iterations;
            inner = check.beta;
            done = check.converged;
        }
    }
    if (!done) {
        Solution step = naive_cd(cp.problem, inner, cd);
        out.iterations += step.iterations;
        inner = step.beta;
        done = step.converged;
        if (polish) {
            auto face = polish_on_face(problem, cp.expand(inner));
            if (face && face->complete) inner = cp.collapse_beta(face->beta);
        }
    }
    out.beta = cp.expand(inner);
    out.objective = loss_value(problem, out.beta);
    out.converged = done;
    return out;
}

Solution solve_exact(const FusedProblem& problem, const Eigen::VectorXd& beta0,
                     const ExactConfig& config) {
    if (problem.loss() != Loss::squared) {
        throw Error(ErrorCode::unsupported_loss, "the exact solver needs the squared loss");
    }
    const int p = problem.p();
    if (beta0.size() != p) {
        throw Error(ErrorCode::dimension_mismatch,
                    "beta0 has length " + std::to_string(beta0.size()) + ", expected p = " +
                        std::to_string(p));
    }
    const int max_rounds = config.max_rounds > 0 ? config.max_rounds : std::max(10 * p, 10);

    std::vector<std::vector<int>> working(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) working[k] = {k};
    Eigen::VectorXd beta = beta0;
    ScheduleRule rule = ScheduleRule::fuse;

    Solution out;
    bool converged = false;
    bool inner_ok = true;
    for (int round = 1; round <= max_rounds; ++round) {
        CollapsedProblem cp = collapse(problem, working);
        double before = loss_value(problem, beta);
        Solution inner = minimize_on_sets(problem, cp, beta, config.cd, config.polish);
        out.iterations += inner.iterations;
        inner_ok = inner.converged;
        Eigen::VectorXd next = std::move(inner.beta);
        double change = (next - beta).cwiseAbs().maxCoeff();

        Partition part = build_partition(problem.graph(), next);
        beta = snap_to_partition(next, part);

        if (config.on_round) {
            RoundInfo info;
            info.round = round;
            info.rule = rule;
            info.working_sets = static_cast<int>(working.size());
            info.partition_sets = part.size();
            info.objective_before = before;
            info.objective_after = loss_value(problem, beta);
            info.max_change = change;
            config.on_round(info);
        }

        // Cheapest rule first after progress; escalate only when nothing moved.
        int first = 0;
        if (change < config.cd.tol && round > 1) first = static_cast<int>(rule) + 1;
        Eigen::VectorXd grad;
        bool updated = false;
        for (int r = first; r <= 2 && !updated; ++r) {
            std::vector<std::vector<int>> candidate;
            if (r == 0) {
                candidate = part.sets;
            } else {
                if (grad.size() == 0) grad = loss_gradient_smooth_part(problem, beta, part);
                candidate = refine_partition(problem, part, grad,
                                             r == 1 ? SplitMode::active : SplitMode::inactive,
                                             config.split_tol)
                                .sets;
            }
            if (candidate != working) {
                working = std::move(candidate);
                rule = static_cast<ScheduleRule>(r);
                updated = true;
            }
        }
        if (!updated) {
            converged = true;
            break;
        }
    }

    out.beta = beta;
    out.objective = loss_value(problem, beta);
    out.converged = converged && inner_ok;
    return out;
}

} // namespace fusedlasso
