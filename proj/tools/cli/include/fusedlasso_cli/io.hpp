#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include <fusedlasso/graph.hpp>
#include <fusedlasso/problem.hpp>

namespace fusedlasso::cli {

/// Malformed or inconsistent input data. The message names the source and line.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Whole-field decimal parse; `where` prefixes the error message.
double parse_double(std::string_view field, std::string_view where);
long parse_integer(std::string_view field, std::string_view where);

// Stream readers. `source` is only used in error messages.
Eigen::MatrixXd parse_matrix_csv(std::istream& in, std::string_view source);
Eigen::VectorXd parse_vector_csv(std::istream& in, std::string_view source);
CoxData parse_cox_csv(std::istream& in, std::string_view source);
/// `k l w` lines, 1-based. Blank lines and lines starting with '#' are skipped.
std::vector<Edge> parse_edges(std::istream& in, std::string_view source, int p);
/// `k w` lines, 1-based; nodes not listed keep weight 1.
std::vector<double> parse_node_weights(std::istream& in, std::string_view source, int p);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& X);
void write_vector_csv(std::ostream& out, const Eigen::VectorXd& v);
void write_cox_csv(std::ostream& out, const CoxData& data);
void write_edges(std::ostream& out, const PenaltyGraph& graph);
void write_node_weights(std::ostream& out, const PenaltyGraph& graph);

// File wrappers; an unreadable file is a DataError.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& file);
CoxData read_cox_csv(const std::filesystem::path& file);
PenaltyGraph read_graph(const std::filesystem::path& edges, int p,
                        const std::optional<std::filesystem::path>& node_weights = std::nullopt);

/// Writes `text` to `file`, creating parent directories.
void write_text_file(const std::filesystem::path& file, std::string_view text);

} // namespace fusedlasso::cli
