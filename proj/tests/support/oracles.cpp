#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace fusedlasso::testing {

Eigen::VectorXd newton_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const int p = static_cast<int>(X.cols());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    auto nll = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd eta = X * b;
        double s = 0.0;
        for (int i = 0; i < eta.size(); ++i) {
            double e = eta[i];
            s += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y[i] * e;
        }
        return s;
    };
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd mu = (1.0 + (-eta.array()).exp()).inverse().matrix();
        Eigen::VectorXd grad = X.transpose() * (mu - y);
        Eigen::VectorXd w = (mu.array() * (1.0 - mu.array())).matrix();
        Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
        Eigen::VectorXd step = H.ldlt().solve(grad);
        double f0 = nll(beta);
        double t = 1.0;
        while (nll(beta - t * step) > f0 && t > 1e-12) t *= 0.5;
        beta -= t * step;
        if (grad.norm() < 1e-13) break;
    }
    return beta;
}

double cox_loglik_direct(const Eigen::MatrixXd& X, const std::vector<double>& time,
                         const std::vector<int>& status, const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = X * beta;
    double ll = 0.0;
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (!status[i]) continue;
        double risk = 0.0;
        for (std::size_t j = 0; j < time.size(); ++j) {
            if (time[j] >= time[i]) risk += std::exp(eta[j]);
        }
        ll += eta[i] - std::log(risk);
    }
    return ll;
}

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Eigen::VectorXd a = x, b = x;
        a[k] += h;
        b[k] -= h;
        g[k] = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
}

double min_cut_enumerate(int nodes, const std::vector<Arc>& arcs, int source, int sink) {
    if (nodes > 20) throw std::invalid_argument("too many nodes to enumerate");
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << nodes); ++mask) {
        if (!(mask >> source & 1u) || (mask >> sink & 1u)) continue;
        double cut = 0.0;
        for (const auto& a : arcs) {
            if ((mask >> a.from & 1u) && !(mask >> a.to & 1u)) cut += a.capacity;
        }
        best = std::min(best, cut);
    }
    return best;
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

PenaltyGraph random_connected_graph(Rng& rng, int p, int max_edges, bool random_weights) {
    std::set<std::pair<int, int>> seen;
    std::vector<Edge> edges;
    auto weight = [&] { return random_weights ? uniform_real(rng, 0.2, 2.0) : 1.0; };
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 1; i < p; ++i) {
        int a = order[i], b = order[uniform_int(rng, 0, i - 1)];
        seen.insert({std::min(a, b), std::max(a, b)});
        edges.push_back({a, b, weight()});
    }
    const int target = std::max(p - 1, std::min(max_edges, p * (p - 1) / 2));
    int extra = uniform_int(rng, 0, target - (p - 1));
    for (int tries = 0; extra > 0 && tries < 1000; ++tries) {
        int a = uniform_int(rng, 0, p - 1), b = uniform_int(rng, 0, p - 1);
        if (a == b || !seen.insert({std::min(a, b), std::max(a, b)}).second) continue;
        edges.push_back({a, b, weight()});
        --extra;
    }
    std::vector<double> w(static_cast<std::size_t>(p), 1.0);
    if (random_weights) {
        for (auto& v : w) v = uniform_real(rng, 0.5, 1.5);
    }
    return PenaltyGraph(p, std::move(w), std::move(edges));
}

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> N;
    Eigen::MatrixXd m(rows, cols);
    for (auto& v : m.reshaped()) v = N(rng);
    return m;
}

Eigen::VectorXd random_vector(Rng& rng, int size, double scale) {
    std::normal_distribution<double> N(0.0, scale);
    Eigen::VectorXd v(size);
    for (auto& x : v) x = N(rng);
    return v;
}

} // namespace fusedlasso::testing
