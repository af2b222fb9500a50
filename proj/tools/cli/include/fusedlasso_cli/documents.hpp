#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include <fusedlasso/path.hpp>
#include <fusedlasso/simgen.hpp>
#include <fusedlasso/solve.hpp>
#include <fusedlasso/verify.hpp>

namespace fusedlasso::cli {

using nlohmann::json;

/// Bumped whenever a field changes meaning or disappears.
inline constexpr int kSchemaVersion = 1;

/// {"p": p, "entries": [[k, value], ...]} with 1-based k, zeros omitted.
json sparse_vector(const Eigen::VectorXd& v);
/// Inverse of sparse_vector; throws DataError on malformed input.
Eigen::VectorXd sparse_vector_from(const json& doc, const std::string& where);

struct SolveRecord {
    Loss loss = Loss::squared;
    SolverKind solver = SolverKind::exact;
    int n = 0;
    int p = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double seconds = 0.0;
    double certificate_residual = 0.0;
    Solution solution;
};

json solution_document(const SolveRecord& record);

struct PathRecord {
    Loss loss = Loss::squared;
    SolverKind solver = SolverKind::exact;
    int n = 0;
    int p = 0;
    double lambda1_max = 0.0;
    double lambda2_max = 0.0;
    json source; ///< where the data came from (files or simulation settings)
    PathResult result;
};

json path_document(const PathRecord& record);
/// Grid and cells of a path document; cell betas are restored from the sparse form.
PathResult path_from_document(const json& doc, const std::string& where);

/// Indented JSON text in which arrays of numbers (and of number pairs) stay on one line.
std::string render(const json& doc);

json metrics_json(const ErrMetrics& m);
json accuracy_document(const ErrReport& report, const std::string& reference, const std::string& candidate);
json optimality_document(const OptimalityReport& report, bool numeric);
json sim_metadata_json(const SimMetadata& meta);

} // namespace fusedlasso::cli
