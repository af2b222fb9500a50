#include "fusedlasso/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "fusedlasso/coordinate.hpp"
#include "fusedlasso/error.hpp"
#include "fusedlasso/flow.hpp"
#include "fusedlasso/fusion.hpp"
#include "fusedlasso/huber.hpp"

namespace fusedlasso {

ErrMetrics error_metrics(const Eigen::VectorXd& reference, const Eigen::VectorXd& candidate) {
    if (reference.size() != candidate.size() || reference.size() == 0) {
        throw Error(ErrorCode::dimension_mismatch, "error metrics need two vectors of equal, nonzero length");
    }
    Eigen::ArrayXd d = (candidate - reference).array().abs();
    const double p = static_cast<double>(d.size());
    return {d.sum() / p, std::sqrt(d.square().sum() / p), d.maxCoeff()};
}

ErrReport accuracy_report(const PathResult& reference, const PathResult& candidate) {
    if (reference.grid.lambda1 != candidate.grid.lambda1 ||
        reference.grid.lambda2 != candidate.grid.lambda2 ||
        reference.cells.size() != candidate.cells.size()) {
        throw Error(ErrorCode::dimension_mismatch, "paths were computed on different grids");
    }
    ErrReport out;
    out.per_cell.resize(reference.cells.size());
    for (std::size_t i = 0; i < reference.cells.size(); ++i) {
        const auto& a = reference.cells[i].beta;
        const auto& b = candidate.cells[i].beta;
        if (!a || !b) continue;
        ErrMetrics m = error_metrics(*a, *b);
        out.per_cell[i] = m;
        out.worst.l1_mean = std::max(out.worst.l1_mean, m.l1_mean);
        out.worst.rmse = std::max(out.worst.rmse, m.rmse);
        out.worst.linf = std::max(out.worst.linf, m.linf);
        ++out.cells_compared;
    }
    if (out.cells_compared == 0) {
        throw Error(ErrorCode::empty_intersection, "no grid cell was solved in both paths");
    }
    return out;
}

const char* to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::coordinate_move: return "coordinate_move";
        case ViolationKind::active_split: return "active_split";
        case ViolationKind::inactive_split: return "inactive_split";
        case ViolationKind::stationarity: return "stationarity";
    }
    return "unknown";
}

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Adds the cross-set difference terms to a data gradient.
Eigen::VectorXd add_cross_terms(const FusedProblem& problem, const Partition& partition,
                                Eigen::VectorXd grad) {
    if (problem.lambda2() == 0.0) return grad;
    for (const auto& e : problem.graph().edges()) {
        int a = partition.set_of[e.k];
        int b = partition.set_of[e.l];
        if (a == b) continue;
        double term = problem.lambda2() * e.weight * sign_of(partition.values[a] - partition.values[b]);
        grad[e.k] += term;
        grad[e.l] -= term;
    }
    return grad;
}

} // namespace

OptimalityCertificate build_certificate(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                        const Partition& partition,
                                        const Eigen::VectorXd& data_grad) {
    const auto& graph = problem.graph();
    const int p = problem.p();
    const double l1 = problem.lambda1();
    const double l2 = problem.lambda2();
    Eigen::VectorXd grad = add_cross_terms(problem, partition, data_grad);

    OptimalityCertificate cert;
    cert.s = Eigen::VectorXd::Zero(p);
    cert.t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(graph.edges().size()));

    for (std::size_t ei = 0; ei < graph.edges().size(); ++ei) {
        const auto& e = graph.edges()[ei];
        int a = partition.set_of[e.k];
        int b = partition.set_of[e.l];
        if (a != b) cert.t[static_cast<Eigen::Index>(ei)] = sign_of(partition.values[a] - partition.values[b]);
    }

    std::vector<int> local(static_cast<std::size_t>(p), -1);
    for (int si = 0; si < partition.size(); ++si) {
        const auto& members = partition.sets[si];
        const double value = partition.values[si];
        const int m = static_cast<int>(members.size());
        for (int i = 0; i < m; ++i) local[members[i]] = i;

        // Net outflow of node k over intra-set edges must lie in [lo_k, hi_k].
        std::vector<double> lo(m), hi(m);
        for (int i = 0; i < m; ++i) {
            int k = members[i];
            double w = l1 * graph.node_weight(k);
            if (value != 0.0) {
                lo[i] = hi[i] = -(grad[k] + w * sign_of(value));
            } else {
                lo[i] = -grad[k] - w;
                hi[i] = -grad[k] + w;
            }
        }

        // Circulation with bounds: hub -> k carries o_k in [lo_k, hi_k]; intra
        // edges carry at most lambda2 w_kl either way. Standard lower-bound
        // reduction to a max flow between an extra source and sink.
        const int hub = m, src = m + 1, snk = m + 2;
        FlowNetwork net(m + 3);
        std::vector<std::pair<int, std::size_t>> intra; // (arc id, edge index)
        for (int i = 0; i < m; ++i) {
            int k = members[i];
            for (const auto& nb : graph.neighbors(k)) {
                int j = local[nb.node];
                if (j > i && partition.set_of[nb.node] == si && l2 > 0.0) {
                    intra.emplace_back(net.add_arc(i, j, l2 * nb.weight, l2 * nb.weight),
                                       static_cast<std::size_t>(nb.edge));
                }
            }
        }
        std::vector<int> hub_arc(m, -1);
        std::vector<double> balance(m + 1, 0.0);
        for (int i = 0; i < m; ++i) {
            if (hi[i] > lo[i]) hub_arc[i] = net.add_arc(hub, i, hi[i] - lo[i]);
            balance[i] += lo[i];
            balance[hub] -= lo[i];
        }
        for (int v = 0; v <= m; ++v) {
            if (balance[v] > 0.0) net.add_arc(src, v, balance[v]);
            else if (balance[v] < 0.0) net.add_arc(v, snk, -balance[v]);
        }
        max_flow(net, src, snk);

        for (const auto& [arc, ei] : intra) {
            const auto& e = graph.edges()[ei];
            double f = net.flow(arc); // from members[i] to members[j]
            double t = std::clamp(f / (l2 * e.weight), -1.0, 1.0);
            int from = members[net.tail(arc)];
            cert.t[static_cast<Eigen::Index>(ei)] = from == e.k ? t : -t;
        }
        for (int i = 0; i < m; ++i) {
            int k = members[i];
            double w = l1 * graph.node_weight(k);
            if (value != 0.0) {
                cert.s[k] = sign_of(value);
            } else if (w > 0.0) {
                double o = lo[i] + (hub_arc[i] >= 0 ? net.flow(hub_arc[i]) : 0.0);
                cert.s[k] = std::clamp((-grad[k] - o) / w, -1.0, 1.0);
            }
        }
        for (int k : members) local[k] = -1;
    }

    // Residual straight from the multipliers: data gradient + l1 w s + l2 sum w t.
    Eigen::VectorXd r = data_grad;
    for (int k = 0; k < p; ++k) r[k] += l1 * graph.node_weight(k) * cert.s[k];
    for (std::size_t ei = 0; ei < graph.edges().size(); ++ei) {
        const auto& e = graph.edges()[ei];
        double f = l2 * e.weight * cert.t[static_cast<Eigen::Index>(ei)];
        r[e.k] += f;
        r[e.l] -= f;
    }
    (void)beta;
    cert.max_residual = p > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
    return cert;
}

OptimalityReport check_optimality(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                  double tol) {
    if (problem.loss() != Loss::squared) {
        throw Error(ErrorCode::unsupported_loss,
                    "check_optimality needs the squared loss; use check_optimality_numeric");
    }
    if (beta.size() != problem.p()) throw Error(ErrorCode::dimension_mismatch, "beta length must equal p");

    Partition part = build_partition(problem.graph(), beta);
    Eigen::VectorXd b = snap_to_partition(beta, part);
    OptimalityReport out;

    CollapsedProblem cp = collapse(problem, part.sets);
    Eigen::VectorXd bt = cp.collapse_beta(b);
    for (int i = 0; i < part.size(); ++i) {
        double move = std::abs(coordinate_minimize(cp.problem, bt, i) - bt[i]);
        if (move > tol) out.violations.push_back({ViolationKind::coordinate_move, part.sets[i], move});
    }

    Eigen::VectorXd data_grad = data_gradient(problem, b);
    Eigen::VectorXd grad = add_cross_terms(problem, part, data_grad);
    for (int i = 0; i < part.size(); ++i) {
        bool active = part.values[i] != 0.0;
        SplitResult r = split_set(problem, part, i, active ? SplitMode::active : SplitMode::inactive,
                                  grad, tol);
        if (r.split()) {
            out.violations.push_back({active ? ViolationKind::active_split : ViolationKind::inactive_split,
                                      part.sets[i],
                                      std::max(r.unsaturated_source, r.unsaturated_sink)});
        }
    }

    out.certificate = build_certificate(problem, b, part, data_grad);
    if (out.certificate.max_residual > tol) {
        std::vector<int> all(static_cast<std::size_t>(problem.p()));
        for (int k = 0; k < problem.p(); ++k) all[k] = k;
        out.violations.push_back({ViolationKind::stationarity, std::move(all), out.certificate.max_residual});
    }
    out.optimal = out.violations.empty();
    return out;
}

Eigen::VectorXd numeric_gradient(const FusedProblem& problem, const Eigen::VectorXd& beta,
                                 double step) {
    Eigen::VectorXd g(beta.size());
    Eigen::VectorXd b = beta;
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
        double h = step * std::max(1.0, std::abs(beta[k]));
        b[k] = beta[k] + h;
        double up = data_loss(problem, b);
        b[k] = beta[k] - h;
        double down = data_loss(problem, b);
        b[k] = beta[k];
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

OptimalityReport check_optimality_numeric(const FusedProblem& problem,
                                          const Eigen::VectorXd& beta, double tol, double step) {
    if (beta.size() != problem.p()) throw Error(ErrorCode::dimension_mismatch, "beta length must equal p");
    Partition part = build_partition(problem.graph(), beta);
    Eigen::VectorXd b = snap_to_partition(beta, part);
    OptimalityReport out;
    out.certificate = build_certificate(problem, b, part, numeric_gradient(problem, b, step));
    if (out.certificate.max_residual > tol) {
        std::vector<int> all(static_cast<std::size_t>(problem.p()));
        for (int k = 0; k < problem.p(); ++k) all[k] = k;
        out.violations.push_back({ViolationKind::stationarity, std::move(all), out.certificate.max_residual});
    }
    out.optimal = out.violations.empty();
    return out;
}

namespace {

constexpr int kOracleMaxIterations = 500; // per continuation stage

// Fully smoothed objective, with gradient and Hessian.
struct Smoothed {
    const FusedProblem& problem;
    double M;

    double value(const Eigen::VectorXd& b) const {
        const auto& g = problem.graph();
        double v = data_loss(problem, b);
        for (int k = 0; k < problem.p(); ++k) v += problem.lambda1() * g.node_weight(k) * huber_penalty(b[k], M);
        for (const auto& e : g.edges()) v += problem.lambda2() * e.weight * huber_penalty(b[e.k] - b[e.l], M);
        return v;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& b) const {
        const auto& g = problem.graph();
        Eigen::VectorXd grad = data_gradient(problem, b);
        for (int k = 0; k < problem.p(); ++k) {
            grad[k] += problem.lambda1() * g.node_weight(k) * std::clamp(M * b[k], -1.0, 1.0);
        }
        for (const auto& e : g.edges()) {
            double d = problem.lambda2() * e.weight * std::clamp(M * (b[e.k] - b[e.l]), -1.0, 1.0);
            grad[e.k] += d;
            grad[e.l] -= d;
        }
        return grad;
    }

    Eigen::MatrixXd hessian(const Eigen::VectorXd& b, const Eigen::MatrixXd& gram) const {
        const auto& g = problem.graph();
        Eigen::MatrixXd H = gram;
        for (int k = 0; k < problem.p(); ++k) {
            if (std::abs(b[k]) < 1.0 / M) H(k, k) += problem.lambda1() * g.node_weight(k) * M;
        }
        for (const auto& e : g.edges()) {
            if (std::abs(b[e.k] - b[e.l]) < 1.0 / M) {
                double c = problem.lambda2() * e.weight * M;
                H(e.k, e.k) += c;
                H(e.l, e.l) += c;
                H(e.k, e.l) -= c;
                H(e.l, e.k) -= c;
            }
        }
        return H;
    }
};

// Upper bound on the norm of any minimizer of the smoothed objective, from the
// level set f <= f(0). Infinite when no penalty or curvature bounds it.
double minimizer_norm_bound(const FusedProblem& problem, double M, double f0) {
    const auto& g = problem.graph();
    const int p = problem.p();
    double best = std::numeric_limits<double>::infinity();
    // Data term is >= 0 only without a linear term; otherwise fall back to curvature.
    if (problem.has_linear_term()) return best;
    double min_w = p > 0 ? *std::min_element(g.node_weights().begin(), g.node_weights().end()) : 1.0;
    if (problem.lambda1() > 0.0) {
        double l1_norm = (f0 / problem.lambda1() + g.total_node_weight() / (2.0 * M)) / min_w;
        best = std::min(best, l1_norm);
    }
    if (problem.lambda2() > 0.0 && g.connected() && !g.edges().empty()) {
        double min_e = std::numeric_limits<double>::infinity();
        for (const auto& e : g.edges()) min_e = std::min(min_e, e.weight);
        // Every edge difference is bounded, hence so is the spread along any path.
        double per_edge = (f0 / problem.lambda2() + g.total_edge_weight() / (2.0 * M)) / min_e;
        double spread = per_edge * (p - 1);
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
        double x1 = (problem.X() * ones).norm();
        if (x1 > 0.0) {
            double opnorm = problem.X().jacobiSvd().singularValues()(0);
            double fit = problem.y().norm() + std::sqrt(2.0 * f0);
            double level = (fit + opnorm * std::sqrt(static_cast<double>(p)) * spread) / x1;
            best = std::min(best, std::sqrt(static_cast<double>(p)) * (level + spread));
        }
    }
    return best;
}

} // namespace

OracleResult smoothed_oracle(const FusedProblem& problem, double M_final, double grad_tol) {
    if (problem.loss() != Loss::squared) {
        throw Error(ErrorCode::unsupported_loss, "the smoothed oracle needs the squared loss");
    }
    if (!(M_final > 0.0) || !(grad_tol > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "oracle needs M > 0 and grad_tol > 0");
    }
    const int p = problem.p();
    const Eigen::MatrixXd gram = problem.X().transpose() * problem.X();
    OracleResult out;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);

    std::vector<double> schedule;
    for (double M = 1.0; M < M_final; M *= 10.0) schedule.push_back(M);
    schedule.push_back(M_final);

    // Damped Newton: the ridge grows whenever a step fails the line search, so
    // near-singular Hessians (n < p, flat directions) fall back toward gradient
    // descent instead of stalling, and shrinks again after each success.
    Eigen::VectorXd grad;
    for (double M : schedule) {
        Smoothed f{problem, M};
        double value = f.value(b);
        grad = f.gradient(b);
        double ridge_floor = 0.0;
        double ridge = 0.0;
        for (int it = 0; it < kOracleMaxIterations && grad.norm() > grad_tol; ++it) {
            ++out.iterations;
            const Eigen::MatrixXd H = f.hessian(b, gram);
            const double hscale = 1.0 + H.diagonal().cwiseAbs().maxCoeff();
            ridge_floor = 1e-14 * hscale;
            ridge = std::max(ridge, ridge_floor);
            bool moved = false;
            while (!moved && ridge <= 1e8 * hscale) {
                Eigen::MatrixXd Hr = H;
                Hr.diagonal().array() += ridge;
                Eigen::VectorXd d = Hr.ldlt().solve(-grad);
                double slope = grad.dot(d);
                if (!d.allFinite() || slope >= 0.0) {
                    ridge *= 100.0;
                    continue;
                }
                double step = 1.0;
                for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
                    Eigen::VectorXd trial = b + step * d;
                    double tv = f.value(trial);
                    if (tv <= value + 1e-4 * step * slope) {
                        Eigen::VectorXd tg = f.gradient(trial);
                        // Also accept pure gradient-norm progress when values tie in rounding.
                        if (tv < value || tg.norm() < grad.norm()) {
                            b = std::move(trial);
                            value = tv;
                            grad = std::move(tg);
                            moved = true;
                        }
                        break;
                    }
                }
                if (!moved) ridge *= 100.0;
            }
            if (!moved) break;
            ridge = std::max(ridge_floor, ridge / 100.0);
        }
    }

    const Smoothed f{problem, M_final};
    out.beta = b;
    out.objective = loss_value(problem, b);
    out.smoothed_objective = f.value(b);
    out.grad_norm = grad.norm();
    out.converged = out.grad_norm <= grad_tol;

    // g(b) - g* <= [g(b) - f(b)] + [f(b) - f*] because f <= g everywhere.
    double smoothing = (problem.lambda1() * problem.graph().total_node_weight() +
                        problem.lambda2() * problem.graph().total_edge_weight()) /
                       (2.0 * M_final);
    double optimality = std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (p > 0 && ev[0] > 1e-10 * scale) {
        // Strong convexity: f(b) - f* <= |grad|^2 / (2 mu).
        optimality = out.grad_norm * out.grad_norm / (2.0 * ev[0]);
    } else if (problem.lambda1() == 0.0 && problem.lambda2() == 0.0) {
        // Plain least squares: the gradient lies in range(X^T X).
        double mu = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev[i] > 1e-10 * scale) {
                mu = ev[i];
                break;
            }
        }
        if (mu > 0.0) optimality = out.grad_norm * out.grad_norm / (2.0 * mu);
        else if (out.grad_norm == 0.0) optimality = 0.0;
    }
    if (!std::isfinite(optimality)) {
        double bound = minimizer_norm_bound(problem, M_final, Smoothed{problem, M_final}.value(Eigen::VectorXd::Zero(p)));
        if (std::isfinite(bound)) optimality = out.grad_norm * (b.norm() + bound);
    }
    out.certified_gap = smoothing + optimality;
    return out;
}

double certificate_residual(const FusedProblem& problem, const Eigen::VectorXd& beta) {
    if (problem.loss() != Loss::squared) {
        return check_optimality_numeric(problem, beta).certificate.max_residual;
    }
    Partition part = build_partition(problem.graph(), beta);
    Eigen::VectorXd b = snap_to_partition(beta, part);
    return build_certificate(problem, b, part, data_gradient(problem, b)).max_residual;
}

} // namespace fusedlasso
