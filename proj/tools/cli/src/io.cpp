#include "fusedlasso_cli/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace fusedlasso::cli {

namespace {

std::string at(std::string_view source, long line) {
    return std::string(source) + ":" + std::to_string(line);
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool skippable(std::string_view line, bool allow_comments) {
    auto t = trim(line);
    return t.empty() || (allow_comments && t.front() == '#');
}

// Rows of comma-separated numbers, blank lines skipped, equal widths enforced.
std::vector<std::vector<double>> parse_rows(std::istream& in, std::string_view source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    long number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (skippable(line, false)) continue;
        auto fields = split_csv(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            row.push_back(parse_double(fields[c], at(source, number) + ": column " + std::to_string(c + 1)));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError(at(source, number) + ": expected " + std::to_string(rows.front().size()) +
                            " columns, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (in.bad()) throw DataError(std::string(source) + ": read error");
    if (rows.empty()) throw DataError(std::string(source) + ": no data rows");
    return rows;
}

std::ifstream open(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError(file.string() + ": cannot open for reading");
    return in;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::string_view where) {
    auto s = trim(field);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError(std::string(where) + ": '" + std::string(field) + "' is not a number");
    }
    if (!std::isfinite(value)) {
        throw DataError(std::string(where) + ": '" + std::string(field) + "' is not finite");
    }
    return value;
}

long parse_integer(std::string_view field, std::string_view where) {
    auto s = trim(field);
    long value = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError(std::string(where) + ": '" + std::string(field) + "' is not an integer");
    }
    return value;
}

Eigen::MatrixXd parse_matrix_csv(std::istream& in, std::string_view source) {
    auto rows = parse_rows(in, source);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) X(i, j) = rows[i][j];
    }
    return X;
}

Eigen::VectorXd parse_vector_csv(std::istream& in, std::string_view source) {
    auto rows = parse_rows(in, source);
    if (rows.front().size() != 1) {
        throw DataError(std::string(source) + ": expected one value per line, found " +
                        std::to_string(rows.front().size()) + " columns");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i][0];
    return v;
}

CoxData parse_cox_csv(std::istream& in, std::string_view source) {
    CoxData out;
    std::string line;
    long number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (skippable(line, false)) continue;
        auto fields = split_csv(line);
        if (fields.size() != 2) {
            throw DataError(at(source, number) + ": expected 'time,status', found " +
                            std::to_string(fields.size()) + " columns");
        }
        out.time.push_back(parse_double(fields[0], at(source, number) + ": time"));
        long status = parse_integer(fields[1], at(source, number) + ": status");
        if (status != 0 && status != 1) {
            throw DataError(at(source, number) + ": status must be 0 or 1");
        }
        out.status.push_back(static_cast<int>(status));
    }
    if (out.time.empty()) throw DataError(std::string(source) + ": no data rows");
    return out;
}

std::vector<Edge> parse_edges(std::istream& in, std::string_view source, int p) {
    std::vector<Edge> edges;
    std::string line;
    long number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (skippable(line, true)) continue;
        auto fields = split_ws(line);
        if (fields.size() != 3) {
            throw DataError(at(source, number) + ": expected 'k l w', found " + std::to_string(fields.size()) +
                            " fields");
        }
        long k = parse_integer(fields[0], at(source, number) + ": k");
        long l = parse_integer(fields[1], at(source, number) + ": l");
        double w = parse_double(fields[2], at(source, number) + ": w");
        for (long node : {k, l}) {
            if (node < 1 || node > p) {
                throw DataError(at(source, number) + ": node " + std::to_string(node) + " outside 1.." +
                                std::to_string(p));
            }
        }
        if (!(w > 0.0)) throw DataError(at(source, number) + ": edge weight must be positive");
        edges.push_back({static_cast<int>(k - 1), static_cast<int>(l - 1), w});
    }
    return edges;
}

std::vector<double> parse_node_weights(std::istream& in, std::string_view source, int p) {
    std::vector<double> w(static_cast<std::size_t>(p), 1.0);
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    std::string line;
    long number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (skippable(line, true)) continue;
        auto fields = split_ws(line);
        if (fields.size() != 2) {
            throw DataError(at(source, number) + ": expected 'k w', found " + std::to_string(fields.size()) +
                            " fields");
        }
        long k = parse_integer(fields[0], at(source, number) + ": k");
        if (k < 1 || k > p) {
            throw DataError(at(source, number) + ": node " + std::to_string(k) + " outside 1.." +
                            std::to_string(p));
        }
        if (seen[k - 1]) throw DataError(at(source, number) + ": node " + std::to_string(k) + " listed twice");
        double value = parse_double(fields[1], at(source, number) + ": w");
        if (!(value > 0.0)) throw DataError(at(source, number) + ": node weight must be positive");
        w[k - 1] = value;
        seen[k - 1] = true;
    }
    return w;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& X) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(X(i, j));
        }
        out << '\n';
    }
}

void write_vector_csv(std::ostream& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

void write_cox_csv(std::ostream& out, const CoxData& data) {
    for (std::size_t i = 0; i < data.time.size(); ++i) {
        out << format_double(data.time[i]) << ',' << data.status[i] << '\n';
    }
}

void write_edges(std::ostream& out, const PenaltyGraph& graph) {
    for (const auto& e : graph.edges()) {
        out << e.k + 1 << ' ' << e.l + 1 << ' ' << format_double(e.weight) << '\n';
    }
}

void write_node_weights(std::ostream& out, const PenaltyGraph& graph) {
    for (int k = 0; k < graph.size(); ++k) out << k + 1 << ' ' << format_double(graph.node_weight(k)) << '\n';
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& file) {
    auto in = open(file);
    return parse_matrix_csv(in, file.string());
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& file) {
    auto in = open(file);
    return parse_vector_csv(in, file.string());
}

CoxData read_cox_csv(const std::filesystem::path& file) {
    auto in = open(file);
    return parse_cox_csv(in, file.string());
}

PenaltyGraph read_graph(const std::filesystem::path& edges, int p,
                        const std::optional<std::filesystem::path>& node_weights) {
    auto in = open(edges);
    auto list = parse_edges(in, edges.string(), p);
    std::vector<double> w(static_cast<std::size_t>(p), 1.0);
    if (node_weights) {
        auto win = open(*node_weights);
        w = parse_node_weights(win, node_weights->string(), p);
    }
    return PenaltyGraph(p, std::move(w), std::move(list));
}

void write_text_file(const std::filesystem::path& file, std::string_view text) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError(file.string() + ": cannot open for writing");
    out << text;
    if (!out) throw DataError(file.string() + ": write failed");
}

} // namespace fusedlasso::cli
