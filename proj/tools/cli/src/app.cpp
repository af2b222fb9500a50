#include "fusedlasso_cli/app.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include <fusedlasso/error.hpp>
#include <fusedlasso/path.hpp>
#include <fusedlasso/simgen.hpp>
#include <fusedlasso/solve.hpp>
#include <fusedlasso/verify.hpp>

#include "fusedlasso_cli/documents.hpp"
#include "fusedlasso_cli/io.hpp"

namespace fusedlasso::cli {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Input flags shared by solve, path and verify: either files or a simulation.
struct DataFlags {
    std::string loss = "squared";
    std::string design;
    std::string response;
    std::string graph;
    std::string node_weights;
    std::string sim;
    int n = 50;
    int p = 100;
    std::uint64_t seed = 1;
    double sigma = 10.0;
};

void add_file_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--loss", f.loss, "squared, logistic or cox")
        ->check(CLI::IsMember({"squared", "logistic", "cox"}))
        ->capture_default_str();
    cmd->add_option("--design", f.design, "design matrix X, headerless CSV (n rows, p columns)");
    cmd->add_option("--response", f.response,
                    "response: one value per line (squared, logistic 0/1) or 'time,status' (cox)");
    cmd->add_option("--graph", f.graph, "penalty graph edge list, lines 'k l w' (1-based)");
    cmd->add_option("--node-weights", f.node_weights, "lasso weights, lines 'k w' (default 1)");
}

void add_sim_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--sim", f.sim, "simulated design: 1d or 2d")->check(CLI::IsMember({"1d", "2d"}));
    cmd->add_option("--n", f.n, "simulated observations")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--p", f.p, "simulated coefficients (2d: side length)")
        ->check(CLI::Range(2, 1 << 20))
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "simulation seed")->capture_default_str();
    cmd->add_option("--sigma", f.sigma, "noise standard deviation")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

SimInstance simulate(const DataFlags& f) {
    SimConfig c;
    c.n = f.n;
    c.p = f.p;
    c.seed = f.seed;
    c.sigma = f.sigma;
    return f.sim == "1d" ? gen_1d(c) : gen_2d(c);
}

json sim_source(const DataFlags& f) {
    return {{"sim", f.sim}, {"n", f.n}, {"p", f.p}, {"seed", f.seed}, {"sigma", f.sigma}};
}

struct Loaded {
    FusedProblem problem;
    json source;
};

Loaded load(const DataFlags& f) {
    const Loss loss = *parse_loss(f.loss);
    if (!f.sim.empty()) {
        if (loss != Loss::squared) throw UsageError("--sim only produces squared-loss data; drop --loss " + f.loss);
        for (const auto* name : {&f.design, &f.response, &f.graph, &f.node_weights}) {
            if (!name->empty()) throw UsageError("--sim cannot be combined with data files");
        }
        SimInstance sim = simulate(f);
        return {FusedProblem::squared(std::move(sim.X), std::move(sim.y), std::move(sim.graph), 0.0, 0.0),
                sim_source(f)};
    }
    if (f.design.empty()) throw UsageError("--design is required (or use --sim)");
    if (f.response.empty()) throw UsageError("--response is required (or use --sim)");
    if (f.graph.empty()) throw UsageError("--graph is required (or use --sim)");

    Eigen::MatrixXd X = read_matrix_csv(f.design);
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    std::optional<fs::path> weights;
    if (!f.node_weights.empty()) weights = f.node_weights;
    PenaltyGraph graph = read_graph(f.graph, p, weights);
    json source = {{"design", f.design}, {"response", f.response}, {"graph", f.graph}};
    if (weights) source["node_weights"] = f.node_weights;

    auto check_rows = [&](long rows) {
        if (rows != n) {
            throw DataError(f.response + ": " + std::to_string(rows) + " responses but " + f.design + " has " +
                            std::to_string(n) + " rows");
        }
    };
    if (loss == Loss::cox) {
        CoxData data = read_cox_csv(f.response);
        check_rows(static_cast<long>(data.time.size()));
        return {FusedProblem::cox(std::move(X), std::move(data), std::move(graph), 0.0, 0.0), source};
    }
    Eigen::VectorXd y = read_vector_csv(f.response);
    check_rows(y.size());
    if (loss == Loss::logistic) {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y[i] != 0.0 && y[i] != 1.0) {
                throw DataError(f.response + ": response " + std::to_string(i + 1) + " is " + format_double(y[i]) +
                                ", logistic responses must be 0 or 1");
            }
        }
        return {FusedProblem::logistic(std::move(X), std::move(y), std::move(graph), 0.0, 0.0), source};
    }
    return {FusedProblem::squared(std::move(X), std::move(y), std::move(graph), 0.0, 0.0), source};
}

int resolve_threads(const CLI::Option* flag, int value) {
    if (flag->count() > 0) return value;
    if (const char* env = std::getenv("FUSED_SOLVE_THREADS"); env && *env) {
        try {
            long v = parse_integer(env, "FUSED_SOLVE_THREADS");
            if (v >= 1 && v <= 1024) return static_cast<int>(v);
        } catch (const DataError&) {
        }
        throw UsageError(std::string("FUSED_SOLVE_THREADS must be an integer in 1..1024, got '") + env + "'");
    }
    return 1;
}

void emit(const json& doc, const std::string& out_path, std::ostream& out) {
    std::string text = render(doc);
    if (out_path.empty()) out << text;
    else write_text_file(out_path, text);
}

// --- solve ---------------------------------------------------------------

struct SolveFlags {
    DataFlags data;
    std::string solver = "exact";
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::string out;
};

int do_solve(const SolveFlags& f, std::ostream& out) {
    Loaded in = load(f.data);
    FusedProblem problem = in.problem.with_lambdas(f.lambda1, f.lambda2);
    SolveRecord r;
    r.loss = problem.loss();
    r.solver = *parse_solver(f.solver);
    r.n = problem.n();
    r.p = problem.p();
    r.lambda1 = f.lambda1;
    r.lambda2 = f.lambda2;
    auto t0 = clock_type::now();
    r.solution = solve(problem, r.solver, Eigen::VectorXd::Zero(problem.p()));
    r.seconds = seconds_since(t0);
    r.certificate_residual = certificate_residual(problem, r.solution.beta);
    emit(solution_document(r), f.out, out);
    return kExitOk;
}

// --- path ----------------------------------------------------------------

struct PathFlags {
    DataFlags data;
    std::string solver = "exact";
    int n1 = 50;
    int n2 = 20;
    double ratio = 1e-4;
    int threads = 1;
    const CLI::Option* threads_flag = nullptr;
    bool cold = false;
    bool no_certify = false;
    int max_nonzero = -1;
    std::string out;
};

PathRecord compute_path(const Loaded& in, SolverKind solver, const PathFlags& f, int threads) {
    PathRecord r;
    r.loss = in.problem.loss();
    r.solver = solver;
    r.n = in.problem.n();
    r.p = in.problem.p();
    r.source = in.source;
    std::vector<std::string> warnings;
    r.lambda1_max = lambda1_max(in.problem);
    r.lambda2_max = lambda2_max(in.problem, &warnings);
    PathGrid grid = PathGrid::exponential(r.lambda1_max, r.lambda2_max, f.n1, f.n2, f.ratio);
    PathOptions opts;
    opts.solver = solver;
    opts.threads = threads;
    opts.warm_start = !f.cold;
    opts.certify = !f.no_certify;
    opts.max_nonzero = f.max_nonzero;
    r.result = run_path(in.problem, grid, opts);
    r.result.warnings.insert(r.result.warnings.begin(), warnings.begin(), warnings.end());
    return r;
}

int do_path(const PathFlags& f, std::ostream& out, std::ostream& err) {
    Loaded in = load(f.data);
    const int threads = resolve_threads(f.threads_flag, f.threads);
    PathRecord r = compute_path(in, *parse_solver(f.solver), f, threads);
    std::map<std::string, int> counts;
    for (const auto& c : r.result.cells) ++counts[to_string(c.status)];
    for (const auto& w : r.result.warnings) err << "warning: " << w << "\n";
    emit(path_document(r), f.out, out);
    if (!f.out.empty()) {
        out << "path: " << r.result.cells.size() << " cells";
        for (const auto& [status, count] : counts) out << ", " << count << " " << status;
        out << " -> " << f.out << "\n";
    }
    return kExitOk;
}

// --- simulate ------------------------------------------------------------

struct SimulateFlags {
    DataFlags data;
    bool no_signal = false;
    std::string out_dir;
};

int do_simulate(const SimulateFlags& f, std::ostream& out) {
    SimConfig c;
    c.n = f.data.n;
    c.p = f.data.p;
    c.seed = f.data.seed;
    c.sigma = f.data.sigma;
    c.signal = !f.no_signal;
    SimInstance sim = f.data.sim == "1d" ? gen_1d(c) : gen_2d(c);
    fs::path dir(f.out_dir);
    auto write = [&](const char* name, auto&& writer) {
        std::ostringstream s;
        writer(s);
        write_text_file(dir / name, s.str());
    };
    write("X.csv", [&](std::ostream& s) { write_matrix_csv(s, sim.X); });
    write("y.csv", [&](std::ostream& s) { write_vector_csv(s, sim.y); });
    write("beta_true.csv", [&](std::ostream& s) { write_vector_csv(s, sim.beta_true); });
    write("graph.edges", [&](std::ostream& s) { write_edges(s, sim.graph); });
    write_text_file(dir / "metadata.json", render(sim_metadata_json(sim.metadata)));
    out << "simulate: n=" << sim.X.rows() << " p=" << sim.X.cols() << " -> " << dir.string() << "\n";
    return kExitOk;
}

// --- verify --------------------------------------------------------------

struct VerifyFlags {
    DataFlags data;
    std::string reference;
    std::string candidate;
    std::string beta;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double tol = 1e-6;
    bool oracle = false;
    std::string out;
};

json read_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw DataError(file + ": cannot open for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(file + ": " + e.what());
    }
}

Eigen::VectorXd read_beta(const std::string& file) {
    if (fs::path(file).extension() == ".json") {
        json doc = read_json_file(file);
        if (!doc.is_object() || !doc.contains("beta")) throw DataError(file + ": no 'beta' field");
        return sparse_vector_from(doc["beta"], file + ": beta");
    }
    return read_vector_csv(file);
}

int do_verify(const VerifyFlags& f, std::ostream& out) {
    const bool accuracy = !f.reference.empty() || !f.candidate.empty();
    if (accuracy) {
        if (f.reference.empty() || f.candidate.empty()) {
            throw UsageError("accuracy mode needs both --reference and --candidate");
        }
        if (!f.beta.empty()) throw UsageError("--beta belongs to optimality mode, not accuracy mode");
        PathResult ref = path_from_document(read_json_file(f.reference), f.reference);
        PathResult cand = path_from_document(read_json_file(f.candidate), f.candidate);
        emit(accuracy_document(accuracy_report(ref, cand), f.reference, f.candidate), f.out, out);
        return kExitOk;
    }
    if (f.beta.empty()) throw UsageError("--beta is required (or give --reference and --candidate)");
    Loaded in = load(f.data);
    FusedProblem problem = in.problem.with_lambdas(f.lambda1, f.lambda2);
    Eigen::VectorXd beta = read_beta(f.beta);
    if (beta.size() != problem.p()) {
        throw DataError(f.beta + ": beta has length " + std::to_string(beta.size()) + ", the design has p = " +
                        std::to_string(problem.p()));
    }
    const bool numeric = problem.loss() != Loss::squared;
    OptimalityReport report = numeric ? check_optimality_numeric(problem, beta, f.tol) : check_optimality(problem, beta, f.tol);
    json doc = optimality_document(report, numeric);
    doc["objective"] = loss_value(problem, beta);
    if (f.oracle) {
        if (numeric) throw UsageError("--oracle needs the squared loss");
        OracleResult o = smoothed_oracle(problem);
        doc["oracle"] = {{"objective", o.objective},
                         {"certified_gap", o.certified_gap},
                         {"converged", o.converged},
                         {"beta", sparse_vector(o.beta)}};
    }
    emit(doc, f.out, out);
    return kExitOk;
}

// --- bench ---------------------------------------------------------------

struct BenchFlags {
    DataFlags data;
    std::vector<std::string> sizes;
    std::vector<std::string> solvers{"exact", "naive", "huber"};
    int n1 = 50;
    int n2 = 20;
    double ratio = 1e-4;
    int threads = 1;
    const CLI::Option* threads_flag = nullptr;
    std::string out;
};

std::pair<int, int> parse_size(const std::string& s) {
    auto x = s.find('x');
    if (x == std::string::npos) throw UsageError("--size expects NxP, got '" + s + "'");
    try {
        long n = parse_integer(std::string_view(s).substr(0, x), "--size");
        long p = parse_integer(std::string_view(s).substr(x + 1), "--size");
        if (n < 1 || p < 2) throw UsageError("--size needs n >= 1 and p >= 2, got '" + s + "'");
        return {static_cast<int>(n), static_cast<int>(p)};
    } catch (const DataError&) {
        throw UsageError("--size expects NxP, got '" + s + "'");
    }
}

int do_bench(const BenchFlags& f, std::ostream& out) {
    std::vector<std::pair<int, int>> sizes;
    for (const auto& s : f.sizes) sizes.push_back(parse_size(s));
    if (sizes.empty()) sizes.emplace_back(f.data.n, f.data.p);
    std::vector<SolverKind> solvers;
    for (const auto& s : f.solvers) {
        auto kind = parse_solver(s);
        if (!kind) throw UsageError("unknown solver '" + s + "' in --solvers");
        if (std::find(solvers.begin(), solvers.end(), *kind) != solvers.end()) {
            throw UsageError("solver '" + s + "' listed twice in --solvers");
        }
        solvers.push_back(*kind);
    }
    const int threads = resolve_threads(f.threads_flag, f.threads);
    // Accuracy is measured against the exact solver when it is part of the run.
    const SolverKind reference =
        std::find(solvers.begin(), solvers.end(), SolverKind::exact) != solvers.end() ? SolverKind::exact : solvers.front();
    const bool with_accuracy = solvers.size() > 1;

    json rows = json::array();
    std::ostringstream table;
    table << "n\tp";
    for (auto s : solvers) table << '\t' << to_string(s) << "_seconds";
    if (with_accuracy) {
        for (auto s : solvers) {
            if (s == reference) continue;
            for (const char* m : {"l1_mean", "rmse", "linf"}) table << '\t' << to_string(s) << '_' << m;
        }
    }
    table << '\n';

    for (auto [n, p] : sizes) {
        DataFlags d = f.data;
        d.n = n;
        d.p = p;
        Loaded in = load(d);
        PathFlags pf;
        pf.n1 = f.n1;
        pf.n2 = f.n2;
        pf.ratio = f.ratio;
        std::map<SolverKind, PathRecord> paths;
        json timing = json::object();
        for (auto s : solvers) {
            // Untimed warm-up: one mid-grid cell, so first-touch costs stay out of the table.
            {
                FusedProblem warm = in.problem.with_lambdas(lambda1_max(in.problem) * 0.1, 0.0);
                (void)solve(warm, s, Eigen::VectorXd::Zero(warm.p()));
            }
            auto t0 = clock_type::now();
            paths[s] = compute_path(in, s, pf, threads);
            double secs = seconds_since(t0);
            int solved = 0, skipped = 0, not_converged = 0;
            for (const auto& c : paths[s].result.cells) {
                solved += c.status == CellStatus::solved;
                skipped += c.status == CellStatus::skipped;
                not_converged += c.status == CellStatus::not_converged;
            }
            timing[to_string(s)] = {{"seconds", secs},
                                    {"cells_solved", solved},
                                    {"cells_not_converged", not_converged},
                                    {"cells_skipped", skipped}};
        }
        json row = {{"n", n}, {"p", p}, {"timing", timing}};
        table << n << '\t' << p;
        for (auto s : solvers) table << '\t' << format_double(timing[to_string(s)]["seconds"].get<double>());
        if (with_accuracy) {
            json acc = json::object();
            for (auto s : solvers) {
                if (s == reference) continue;
                ErrReport rep = accuracy_report(paths[reference].result, paths[s].result);
                acc[to_string(s)] = metrics_json(rep.worst);
                acc[to_string(s)]["cells_compared"] = rep.cells_compared;
                for (double v : {rep.worst.l1_mean, rep.worst.rmse, rep.worst.linf}) table << '\t' << format_double(v);
            }
            row["accuracy"] = {{"reference", to_string(reference)}, {"worst", acc}};
        }
        table << '\n';
        rows.push_back(std::move(row));
    }

    std::vector<std::string> names;
    for (auto s : solvers) names.emplace_back(to_string(s));
    json doc = {{"schema_version", kSchemaVersion},
                {"kind", "bench"},
                {"sim", f.data.sim},
                {"seed", f.data.seed},
                {"sigma", f.data.sigma},
                {"grid", {{"n1", f.n1}, {"n2", f.n2}, {"ratio", f.ratio}}},
                {"threads", threads},
                {"solvers", names},
                {"rows", std::move(rows)}};
    out << table.str();
    if (!f.out.empty()) write_text_file(f.out, render(doc));
    return kExitOk;
}

void add_grid_flags(CLI::App* cmd, int& n1, int& n2, double& ratio) {
    cmd->add_option("--n1", n1, "lambda1 grid points")->check(CLI::Range(1, 100000))->capture_default_str();
    cmd->add_option("--n2", n2, "lambda2 grid points")->check(CLI::Range(1, 100000))->capture_default_str();
    cmd->add_option("--ratio", ratio, "smallest / largest grid value")
        ->check(CLI::Range(1e-300, 1.0))
        ->capture_default_str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized fused lasso solver: exact, naive and Huber coordinate descent"};
    app.name("fused_solve");
    app.require_subcommand(1);

    SolveFlags sf;
    auto* solve_cmd = app.add_subcommand("solve", "solve one (lambda1, lambda2) problem");
    add_file_flags(solve_cmd, sf.data);
    solve_cmd->add_option("--solver", sf.solver, "exact, naive or huber")
        ->check(CLI::IsMember({"exact", "naive", "huber"}))
        ->capture_default_str();
    auto* solve_l1 = solve_cmd->add_option("--lambda1", sf.lambda1, "lasso penalty (required)")->check(CLI::NonNegativeNumber);
    auto* solve_l2 = solve_cmd->add_option("--lambda2", sf.lambda2, "fusion penalty (required)")->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--out", sf.out, "solution JSON (default: standard output)");

    PathFlags pf;
    auto* path_cmd = app.add_subcommand("path", "solve over the (lambda1, lambda2) grid");
    add_file_flags(path_cmd, pf.data);
    add_sim_flags(path_cmd, pf.data);
    path_cmd->add_option("--solver", pf.solver, "exact, naive or huber")
        ->check(CLI::IsMember({"exact", "naive", "huber"}))
        ->capture_default_str();
    add_grid_flags(path_cmd, pf.n1, pf.n2, pf.ratio);
    pf.threads_flag = path_cmd->add_option("--threads", pf.threads, "rows solved concurrently (env FUSED_SOLVE_THREADS)")
                          ->check(CLI::Range(1, 1024));
    path_cmd->add_flag("--cold", pf.cold, "start every cell from zero instead of the previous cell");
    path_cmd->add_flag("--no-certify", pf.no_certify, "skip the per-cell certificate residual");
    path_cmd->add_option("--max-nonzero", pf.max_nonzero, "stop rule threshold (default 2n)")
        ->check(CLI::NonNegativeNumber);
    path_cmd->add_option("--out", pf.out, "path JSON (default: standard output)");

    SimulateFlags mf;
    auto* sim_cmd = app.add_subcommand("simulate", "write a simulated instance as data files");
    add_sim_flags(sim_cmd, mf.data);
    sim_cmd->add_flag("--no-signal", mf.no_signal, "force beta_true = 0");
    sim_cmd->add_option("--out-dir", mf.out_dir,
                        "directory for X.csv, y.csv, beta_true.csv, graph.edges, metadata.json (required)");

    VerifyFlags vf;
    auto* verify_cmd = app.add_subcommand("verify", "check optimality of a beta, or compare two paths");
    add_file_flags(verify_cmd, vf.data);
    verify_cmd->add_option("--beta", vf.beta, "beta to check: solution JSON or one value per line");
    verify_cmd->add_option("--lambda1", vf.lambda1, "lasso penalty")->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--lambda2", vf.lambda2, "fusion penalty")->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--tol", vf.tol, "violation tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    verify_cmd->add_flag("--oracle", vf.oracle, "also run the smoothed reference solver");
    verify_cmd->add_option("--reference", vf.reference, "reference path JSON (accuracy mode)");
    verify_cmd->add_option("--candidate", vf.candidate, "candidate path JSON (accuracy mode)");
    verify_cmd->add_option("--out", vf.out, "report JSON (default: standard output)");

    BenchFlags bf;
    bf.data.sim = "1d";
    auto* bench_cmd = app.add_subcommand("bench", "time full paths of several solvers on simulated data");
    add_sim_flags(bench_cmd, bf.data);
    bench_cmd->add_option("--size", bf.sizes, "NxP instance size, repeatable (default --n x --p)");
    bench_cmd->add_option("--solvers", bf.solvers, "comma-separated solver list")
        ->delimiter(',')
        ->capture_default_str();
    add_grid_flags(bench_cmd, bf.n1, bf.n2, bf.ratio);
    bf.threads_flag = bench_cmd->add_option("--threads", bf.threads, "rows solved concurrently (env FUSED_SOLVE_THREADS)")
                          ->check(CLI::Range(1, 1024));
    bench_cmd->add_option("--out", bf.out, "bench JSON; the table always goes to standard output");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        auto need = [](const CLI::Option* opt, const char* name) {
            if (opt->count() == 0) throw UsageError(std::string(name) + " is required");
        };
        if (solve_cmd->parsed()) {
            need(solve_l1, "--lambda1");
            need(solve_l2, "--lambda2");
            return do_solve(sf, out);
        }
        if (sim_cmd->parsed()) {
            if (mf.data.sim.empty()) throw UsageError("--sim is required");
            if (mf.out_dir.empty()) throw UsageError("--out-dir is required");
        }
        if (path_cmd->parsed()) return do_path(pf, out, err);
        if (sim_cmd->parsed()) return do_simulate(mf, out);
        if (verify_cmd->parsed()) return do_verify(vf, out);
        if (bench_cmd->parsed()) return do_bench(bf, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

} // namespace fusedlasso::cli
