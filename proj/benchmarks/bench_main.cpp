#include <random>

#include <benchmark/benchmark.h>

#include <fusedlasso/fusedlasso.hpp>

using namespace fusedlasso;

namespace {

FusedProblem sim_problem(int n, int p, double fraction1, double fraction2) {
    SimConfig cfg;
    cfg.n = n;
    cfg.p = p;
    cfg.seed = 1;
    SimInstance sim = gen_1d(cfg);
    auto q = FusedProblem::squared(sim.X, sim.y, sim.graph, 0, 0);
    return q.with_lambdas(fraction1 * lambda1_max(q), fraction2 * lambda2_max(q));
}

// One cell of the regularization path, cold-started. Args: p, solver.
void BM_SolveCell(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const auto kind = static_cast<SolverKind>(state.range(1));
    FusedProblem q = sim_problem(p / 2, p, 0.05, 0.05);
    for (auto _ : state) {
        Solution s = solve(q, kind, Eigen::VectorXd::Zero(p));
        benchmark::DoNotOptimize(s.objective);
    }
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_SolveCell)
    ->ArgsProduct({{50, 100, 200}, {static_cast<int>(SolverKind::exact), static_cast<int>(SolverKind::naive),
                                    static_cast<int>(SolverKind::huber)}})
    ->Unit(benchmark::kMillisecond);

// A 10 x 5 warm-started path. Args: solver.
void BM_SmallPath(benchmark::State& state) {
    const auto kind = static_cast<SolverKind>(state.range(0));
    FusedProblem q = sim_problem(50, 100, 1.0, 1.0);
    PathGrid grid = PathGrid::exponential(q.lambda1(), q.lambda2(), 10, 5);
    PathOptions opts;
    opts.solver = kind;
    opts.certify = false;
    for (auto _ : state) {
        PathResult r = run_path(q, grid, opts);
        benchmark::DoNotOptimize(r.cells.data());
    }
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_SmallPath)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

// Push-relabel on a random layered network with `nodes` nodes.
void BM_MaxFlow(benchmark::State& state) {
    const int nodes = static_cast<int>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(0, nodes - 1);
    std::uniform_real_distribution<double> cap(0.0, 10.0);
    FlowNetwork base(nodes);
    for (int i = 0; i < 4 * nodes; ++i) {
        int a = pick(rng), b = pick(rng);
        if (a != b) base.add_arc(a, b, cap(rng), cap(rng));
    }
    for (auto _ : state) {
        FlowNetwork net = base;
        benchmark::DoNotOptimize(max_flow(net, 0, nodes - 1));
    }
}
BENCHMARK(BM_MaxFlow)->RangeMultiplier(4)->Range(64, 4096);

// Split check on a fully fused chain of length p.
void BM_SplitCheck(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    FusedProblem q = sim_problem(p / 2, p, 0.0, 0.5);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(p, 0.3);
    Partition part = build_partition(q.graph(), beta);
    Eigen::VectorXd grad = loss_gradient_smooth_part(q, beta, part);
    for (auto _ : state) {
        SplitResult r = split_set(q, part, 0, SplitMode::active, grad);
        benchmark::DoNotOptimize(r.flow_value);
    }
}
BENCHMARK(BM_SplitCheck)->RangeMultiplier(4)->Range(64, 1024);

} // namespace

BENCHMARK_MAIN();
