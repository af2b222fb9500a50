#include "fusedlasso_cli/documents.hpp"

#include "fusedlasso_cli/io.hpp"

#include <algorithm>

namespace fusedlasso::cli {

namespace {

bool flat(const json& j) {
    if (!j.is_array()) return j.is_primitive();
    return std::all_of(j.begin(), j.end(), [](const json& e) {
        return e.is_primitive() || (e.is_array() && std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_primitive(); }));
    });
}

void render_into(const json& j, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_object() && !j.empty()) {
        out += "{\n";
        std::size_t i = 0;
        for (const auto& [key, value] : j.items()) {
            out += pad + json(key).dump() + ": ";
            render_into(value, depth + 1, out);
            out += ++i < j.size() ? ",\n" : "\n";
        }
        out += close + "}";
    } else if (j.is_array() && !j.empty() && !flat(j)) {
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += pad;
            render_into(j[i], depth + 1, out);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += close + "]";
    } else {
        out += j.dump();
    }
}

} // namespace

std::string render(const json& doc) {
    std::string out;
    render_into(doc, 0, out);
    out += "\n";
    return out;
}

json sparse_vector(const Eigen::VectorXd& v) {
    json entries = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (v[k] != 0.0) entries.push_back(json::array({k + 1, v[k]}));
    }
    return {{"p", v.size()}, {"entries", std::move(entries)}};
}

Eigen::VectorXd sparse_vector_from(const json& doc, const std::string& where) {
    if (!doc.is_object() || !doc.contains("p") || !doc.contains("entries") || !doc["p"].is_number_integer() ||
        !doc["entries"].is_array()) {
        throw DataError(where + ": expected {\"p\": int, \"entries\": [[k, value], ...]}");
    }
    const long p = doc["p"].get<long>();
    if (p < 0) throw DataError(where + ": negative p");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    std::size_t i = 0;
    for (const auto& e : doc["entries"]) {
        std::string at = where + ": entries[" + std::to_string(i++) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
            throw DataError(at + ": expected [k, value]");
        }
        long k = e[0].get<long>();
        if (k < 1 || k > p) throw DataError(at + ": index " + std::to_string(k) + " outside 1.." + std::to_string(p));
        v[k - 1] = e[1].get<double>();
    }
    return v;
}

json solution_document(const SolveRecord& r) {
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "solution"},
        {"loss", to_string(r.loss)},
        {"solver", to_string(r.solver)},
        {"n", r.n},
        {"p", r.p},
        {"lambda1", r.lambda1},
        {"lambda2", r.lambda2},
        {"objective", r.solution.objective},
        {"converged", r.solution.converged},
        {"iterations", r.solution.iterations},
        {"seconds", r.seconds},
        {"certificate_residual", r.certificate_residual},
        {"nonzeros", count_nonzero(r.solution.beta)},
        {"beta", sparse_vector(r.solution.beta)},
    };
}

json path_document(const PathRecord& r) {
    json cells = json::array();
    for (const auto& c : r.result.cells) {
        json cell = {
            {"i1", c.i1},
            {"i2", c.i2},
            {"lambda1", c.lambda1},
            {"lambda2", c.lambda2},
            {"status", to_string(c.status)},
        };
        if (c.beta) {
            cell["objective"] = c.objective;
            cell["certificate_residual"] = c.certificate_residual;
            cell["seconds"] = c.seconds;
            cell["nonzeros"] = c.nonzeros;
            cell["beta"] = sparse_vector(*c.beta);
        }
        if (!c.message.empty()) cell["message"] = c.message;
        cells.push_back(std::move(cell));
    }
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "path"},
        {"loss", to_string(r.loss)},
        {"solver", to_string(r.solver)},
        {"n", r.n},
        {"p", r.p},
        {"source", r.source},
        {"lambda1_max", r.lambda1_max},
        {"lambda2_max", r.lambda2_max},
        {"grid", {{"lambda1", r.result.grid.lambda1}, {"lambda2", r.result.grid.lambda2}}},
        {"warnings", r.result.warnings},
        {"cells", std::move(cells)},
    };
}

namespace {

std::optional<CellStatus> parse_status(const std::string& s) {
    for (auto st : {CellStatus::solved, CellStatus::not_converged, CellStatus::skipped, CellStatus::failed}) {
        if (s == to_string(st)) return st;
    }
    return std::nullopt;
}

} // namespace

PathResult path_from_document(const json& doc, const std::string& where) {
    try {
        if (doc.at("kind").get<std::string>() != "path") throw DataError(where + ": not a path document");
        PathResult out;
        out.grid.lambda1 = doc.at("grid").at("lambda1").get<std::vector<double>>();
        out.grid.lambda2 = doc.at("grid").at("lambda2").get<std::vector<double>>();
        const auto& cells = doc.at("cells");
        if (!cells.is_array() || static_cast<int>(cells.size()) != out.grid.size()) {
            throw DataError(where + ": cell count does not match the grid");
        }
        out.cells.resize(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& c = cells[i];
            std::string at = where + ": cells[" + std::to_string(i) + "]";
            int i1 = c.at("i1").get<int>(), i2 = c.at("i2").get<int>();
            if (i1 < 0 || i1 >= out.grid.n1() || i2 < 0 || i2 >= out.grid.n2()) {
                throw DataError(at + ": grid index out of range");
            }
            PathCell& cell = out.cells[out.grid.index(i1, i2)];
            cell.i1 = i1;
            cell.i2 = i2;
            cell.lambda1 = c.at("lambda1").get<double>();
            cell.lambda2 = c.at("lambda2").get<double>();
            auto status = parse_status(c.at("status").get<std::string>());
            if (!status) throw DataError(at + ": unknown status");
            cell.status = *status;
            if (c.contains("beta")) {
                cell.beta = sparse_vector_from(c["beta"], at + ".beta");
                cell.objective = c.value("objective", 0.0);
                cell.certificate_residual = c.value("certificate_residual", 0.0);
                cell.seconds = c.value("seconds", 0.0);
                cell.nonzeros = c.value("nonzeros", 0);
            }
            cell.message = c.value("message", std::string());
        }
        if (doc.contains("warnings")) out.warnings = doc["warnings"].get<std::vector<std::string>>();
        return out;
    } catch (const json::exception& e) {
        throw DataError(where + ": " + e.what());
    }
}

json metrics_json(const ErrMetrics& m) {
    return {{"l1_mean", m.l1_mean}, {"rmse", m.rmse}, {"linf", m.linf}};
}

json accuracy_document(const ErrReport& report, const std::string& reference, const std::string& candidate) {
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "accuracy"},
        {"reference", reference},
        {"candidate", candidate},
        {"cells_compared", report.cells_compared},
        {"worst", metrics_json(report.worst)},
    };
}

json optimality_document(const OptimalityReport& report, bool numeric) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        std::vector<int> nodes;
        for (int k : v.nodes) nodes.push_back(k + 1);
        violations.push_back({{"kind", to_string(v.kind)}, {"nodes", nodes}, {"magnitude", v.magnitude}});
    }
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "optimality"},
        {"method", numeric ? "numeric_gradient" : "flow"},
        {"optimal", report.optimal},
        {"certificate_residual", report.certificate.max_residual},
        {"violations", std::move(violations)},
    };
}

json sim_metadata_json(const SimMetadata& meta) {
    return {
        {"schema_version", kSchemaVersion},
        {"kind", "simulation"},
        {"dims", meta.dims},
        {"seed", meta.seed},
        {"n", meta.n},
        {"p", meta.p},
        {"sigma", meta.sigma},
        {"block", meta.block},
        {"block_start", meta.block_start + 1},
    };
}

} // namespace fusedlasso::cli
