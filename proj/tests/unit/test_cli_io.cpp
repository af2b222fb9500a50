#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include <fusedlasso_cli/documents.hpp>
#include <fusedlasso_cli/io.hpp>

#include "oracles.hpp"

using namespace fusedlasso;
using namespace fusedlasso::cli;
namespace ft = fusedlasso::testing;

namespace {

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const DataError& e) {
        return e.what();
    }
    return "<no error>";
}

} // namespace

TEST(FormatDouble, RoundTripsBitForBit) {
    ft::Rng rng(101);
    std::vector<double> values{0.0, -0.0, 1.0, 0.1, 1e-300, 5e-324, 1.7976931348623157e308, -2.5, 1.0 / 3.0};
    for (int i = 0; i < 10000; ++i) {
        double v = ft::uniform_real(rng, -1, 1) * std::pow(10.0, ft::uniform_int(rng, -30, 30));
        values.push_back(v);
    }
    for (double v : values) {
        double back = parse_double(format_double(v), "test");
        EXPECT_EQ(std::signbit(back), std::signbit(v));
        EXPECT_EQ(back, v) << format_double(v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
}

TEST(ParseNumbers, RejectPartialAndNonFiniteFields) {
    EXPECT_EQ(parse_double("+1.5", "x"), 1.5);
    EXPECT_EQ(parse_double("-3e2", "x"), -300.0);
    EXPECT_EQ(message_of([] { parse_double("1.5x", "f:3"); }), "f:3: '1.5x' is not a number");
    EXPECT_EQ(message_of([] { parse_double("inf", "f:3"); }), "f:3: 'inf' is not finite");
    EXPECT_EQ(message_of([] { parse_double("", "f:3"); }), "f:3: '' is not a number");
    EXPECT_EQ(parse_integer("42", "x"), 42);
    EXPECT_EQ(message_of([] { parse_integer("4.2", "g"); }), "g: '4.2' is not an integer");
}

TEST(MatrixCsv, RoundTripAndErrors) {
    ft::Rng rng(102);
    Eigen::MatrixXd X = ft::random_matrix(rng, 7, 4);
    X(0, 0) = 1e-310;
    std::stringstream ss;
    write_matrix_csv(ss, X);
    EXPECT_EQ(parse_matrix_csv(ss, "X.csv"), X);

    std::istringstream blanks("1,2\n\n3,4\n");
    EXPECT_EQ(parse_matrix_csv(blanks, "X.csv"), (Eigen::Matrix2d{{1, 2}, {3, 4}}));
    std::istringstream ragged("1,2\n3\n");
    EXPECT_NE(message_of([&] { parse_matrix_csv(ragged, "X.csv"); }).find("X.csv:2"), std::string::npos);
    std::istringstream word("1,2\n3,abc\n");
    EXPECT_NE(message_of([&] { parse_matrix_csv(word, "X.csv"); }).find("'abc' is not a number"), std::string::npos);
    std::istringstream empty("\n\n");
    EXPECT_EQ(message_of([&] { parse_matrix_csv(empty, "X.csv"); }), "X.csv: no data rows");
}

TEST(VectorCsv, RoundTripAndShapeCheck) {
    Eigen::VectorXd v(3);
    v << 0.1, -7, 1e20;
    std::stringstream ss;
    write_vector_csv(ss, v);
    EXPECT_EQ(ss.str(), "0.1\n-7\n1e+20\n");
    EXPECT_EQ(parse_vector_csv(ss, "y.csv"), v);
    std::istringstream wide("1,2\n");
    EXPECT_NE(message_of([&] { parse_vector_csv(wide, "y.csv"); }).find("one value per line"), std::string::npos);
}

TEST(CoxCsv, RoundTripAndStatusCheck) {
    CoxData d{{1.5, 2.0, 0.25}, {1, 0, 1}};
    std::stringstream ss;
    write_cox_csv(ss, d);
    CoxData back = parse_cox_csv(ss, "s.csv");
    EXPECT_EQ(back.time, d.time);
    EXPECT_EQ(back.status, d.status);
    std::istringstream bad("1,2\n");
    EXPECT_EQ(message_of([&] { parse_cox_csv(bad, "s.csv"); }), "s.csv:1: status must be 0 or 1");
}

TEST(Edges, ParseCommentsRangesAndWeights) {
    std::istringstream in("# chain\n1 2 1\n\n2 3 0.5\n");
    auto edges = parse_edges(in, "g.edges", 3);
    ASSERT_EQ(edges.size(), 2u);
    EXPECT_EQ(edges[1].k, 1);
    EXPECT_EQ(edges[1].l, 2);
    EXPECT_EQ(edges[1].weight, 0.5);
    std::istringstream range("1 4 1\n");
    EXPECT_NE(message_of([&] { parse_edges(range, "g.edges", 3); }).find("g.edges:1: node 4 outside 1..3"),
              std::string::npos);
    std::istringstream zero("1 2 0\n");
    EXPECT_EQ(message_of([&] { parse_edges(zero, "g.edges", 3); }), "g.edges:1: edge weight must be positive");
    std::istringstream two("1 2\n");
    EXPECT_NE(message_of([&] { parse_edges(two, "g.edges", 3); }).find("expected 'k l w'"), std::string::npos);
}

TEST(Edges, GraphRoundTrip) {
    ft::Rng rng(103);
    PenaltyGraph g = ft::random_connected_graph(rng, 9, 14, true);
    std::stringstream es, ws;
    write_edges(es, g);
    write_node_weights(ws, g);
    PenaltyGraph back(9, parse_node_weights(ws, "w", 9), parse_edges(es, "e", 9));
    ASSERT_EQ(back.edges().size(), g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        EXPECT_EQ(back.edges()[i].k, g.edges()[i].k);
        EXPECT_EQ(back.edges()[i].l, g.edges()[i].l);
        EXPECT_EQ(back.edges()[i].weight, g.edges()[i].weight);
    }
    EXPECT_EQ(back.node_weights(), g.node_weights());
}

TEST(NodeWeights, DefaultsAndDuplicates) {
    std::istringstream in("2 3.5\n");
    EXPECT_EQ(parse_node_weights(in, "w", 3), (std::vector<double>{1.0, 3.5, 1.0}));
    std::istringstream dup("2 3.5\n2 1\n");
    EXPECT_EQ(message_of([&] { parse_node_weights(dup, "w", 3); }), "w:2: node 2 listed twice");
}

TEST(Files, MissingFileIsADataError) {
    auto missing = std::filesystem::temp_directory_path() / "fusedlasso_no_such_dir" / "X.csv";
    EXPECT_NE(message_of([&] { read_matrix_csv(missing); }).find("cannot open for reading"), std::string::npos);
}

TEST(Documents, SparseVectorRoundTrip) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
    v[1] = 0.5;
    v[4] = -1.0 / 3.0;
    json doc = sparse_vector(v);
    EXPECT_EQ(doc["p"], 6);
    EXPECT_EQ(doc["entries"].size(), 2u);
    EXPECT_EQ(doc["entries"][0][0], 2);
    EXPECT_EQ(sparse_vector_from(doc, "beta"), v);
    json bad = {{"p", 2}, {"entries", {{3, 1.0}}}};
    EXPECT_THROW(sparse_vector_from(bad, "beta"), DataError);
}

TEST(Documents, PathRoundTrip) {
    auto q = FusedProblem::squared(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(2, 0, 1), PenaltyGraph::chain(3), 0, 0);
    PathRecord rec;
    rec.n = 3;
    rec.p = 3;
    rec.result = run_path(q, PathGrid::exponential(2.0, 1.0, 4, 3));
    rec.result.cells[0].beta.reset();
    rec.result.cells[0].status = CellStatus::skipped;
    std::string text = render(path_document(rec));
    PathResult back = path_from_document(json::parse(text), "path.json");
    EXPECT_EQ(back.grid.lambda1, rec.result.grid.lambda1);
    EXPECT_EQ(back.grid.lambda2, rec.result.grid.lambda2);
    ASSERT_EQ(back.cells.size(), rec.result.cells.size());
    for (std::size_t c = 0; c < back.cells.size(); ++c) {
        EXPECT_EQ(back.cells[c].status, rec.result.cells[c].status);
        EXPECT_EQ(back.cells[c].beta.has_value(), rec.result.cells[c].beta.has_value());
        if (back.cells[c].beta) {
            EXPECT_EQ(*back.cells[c].beta, *rec.result.cells[c].beta);
        }
    }
}

TEST(Documents, RenderKeepsNumberArraysOnOneLine) {
    json doc = {{"a", {1, 2, 3}}, {"b", {{1, 0.5}, {2, 0.25}}}, {"c", {{"d", 1}}}};
    std::string text = render(doc);
    EXPECT_NE(text.find("[1,2,3]"), std::string::npos) << text;
    EXPECT_NE(text.find("[[1,0.5],[2,0.25]]"), std::string::npos) << text;
    EXPECT_EQ(json::parse(text), doc);
}
