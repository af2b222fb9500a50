#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include <fusedlasso/coordinate.hpp>
#include <fusedlasso/error.hpp>
#include <fusedlasso/fusion.hpp>
#include <fusedlasso/verify.hpp>

#include "oracles.hpp"

using namespace fusedlasso;
namespace ft = fusedlasso::testing;

namespace {

PathResult path_with(const PathGrid& grid, const std::vector<std::optional<Eigen::VectorXd>>& betas) {
    PathResult r;
    r.grid = grid;
    for (int i = 0; i < grid.size(); ++i) {
        PathCell c;
        c.beta = betas[static_cast<std::size_t>(i)];
        c.status = c.beta ? CellStatus::solved : CellStatus::skipped;
        r.cells.push_back(c);
    }
    return r;
}

FusedProblem stall_instance(double l2) {
    return FusedProblem::squared(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(2, 0), PenaltyGraph::chain(2), 0, l2);
}

} // namespace

TEST(ErrorMetrics, HandValuesAndNormOrdering) {
    ErrMetrics m = error_metrics(Eigen::Vector4d(0, 0, 0, 0), Eigen::Vector4d(1, -1, 0, 2));
    EXPECT_DOUBLE_EQ(m.l1_mean, 1.0);
    EXPECT_DOUBLE_EQ(m.rmse, std::sqrt(6.0 / 4.0));
    EXPECT_DOUBLE_EQ(m.linf, 2.0);
    ft::Rng rng(91);
    for (int t = 0; t < 1000; ++t) {
        int p = ft::uniform_int(rng, 1, 30);
        ErrMetrics r = error_metrics(ft::random_vector(rng, p), ft::random_vector(rng, p));
        EXPECT_GE(r.linf, r.rmse - 1e-15);
        EXPECT_GE(r.rmse, r.l1_mean - 1e-15);
        EXPECT_GE(r.l1_mean, 0.0);
    }
    EXPECT_THROW(error_metrics(Eigen::VectorXd(2), Eigen::VectorXd(3)), Error);
}

TEST(AccuracyReport, IdenticalShiftedAndPartialPaths) {
    PathGrid grid = PathGrid::exponential(1.0, 1.0, 3, 2);
    ft::Rng rng(92);
    std::vector<std::optional<Eigen::VectorXd>> betas;
    for (int i = 0; i < grid.size(); ++i) betas.emplace_back(ft::random_vector(rng, 5));
    PathResult ref = path_with(grid, betas);
    ErrReport same = accuracy_report(ref, ref);
    EXPECT_EQ(same.worst.linf, 0.0);
    EXPECT_EQ(same.cells_compared, 6);

    auto shifted = betas;
    *shifted[2] = shifted[2]->array() + 0.1;
    ErrReport r = accuracy_report(ref, path_with(grid, shifted));
    EXPECT_NEAR(r.worst.linf, 0.1, 1e-12);
    EXPECT_NEAR(r.worst.rmse, 0.1, 1e-12);
    EXPECT_NEAR(r.worst.l1_mean, 0.1, 1e-12);

    auto partial = betas;
    partial[0].reset();
    ErrReport p = accuracy_report(ref, path_with(grid, partial));
    EXPECT_EQ(p.cells_compared, 5);
    EXPECT_FALSE(p.per_cell[0].has_value());

    std::vector<std::optional<Eigen::VectorXd>> none(6);
    try {
        accuracy_report(ref, path_with(grid, none));
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_intersection);
    }
    EXPECT_THROW(accuracy_report(ref, path_with(PathGrid::exponential(2.0, 1.0, 3, 2), betas)), Error);
}

TEST(CheckOptimality, AcceptsExactSolutionsAndRejectsPerturbations) {
    ft::Rng rng(93);
    const double tol = 1e-6;
    for (int t = 0; t < 30; ++t) {
        int p = ft::uniform_int(rng, 2, 10);
        auto q = FusedProblem::squared(ft::random_matrix(rng, p + 5, p), ft::random_vector(rng, p + 5, 3.0),
                                       ft::random_connected_graph(rng, p, 2 * p, true), ft::uniform_real(rng, 0, 1),
                                       ft::uniform_real(rng, 0, 1));
        Solution s = solve_exact(q, Eigen::VectorXd::Zero(p));
        OptimalityReport ok = check_optimality(q, s.beta, tol);
        EXPECT_TRUE(ok.optimal) << "trial " << t;
        EXPECT_LE(ok.certificate.max_residual, tol);
        EXPECT_LE(ok.certificate.s.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
        EXPECT_LE(ok.certificate.t.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
        Eigen::VectorXd bad = s.beta;
        bad[ft::uniform_int(rng, 0, p - 1)] += (ft::uniform_int(rng, 0, 1) ? 10.0 : -10.0) * tol;
        EXPECT_FALSE(check_optimality(q, bad, tol).optimal) << "trial " << t;
    }
}

TEST(CheckOptimality, NullModelCertificate) {
    ft::Rng rng(94);
    Eigen::MatrixXd X = ft::random_matrix(rng, 10, 4);
    Eigen::VectorXd y = ft::random_vector(rng, 10);
    Eigen::VectorXd score = X.transpose() * y;
    const double l1 = 1.5 * score.cwiseAbs().maxCoeff();
    auto q = FusedProblem::squared(X, y, PenaltyGraph::chain(4), l1, 0.0);
    OptimalityReport r = check_optimality(q, Eigen::VectorXd::Zero(4));
    ASSERT_TRUE(r.optimal);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(r.certificate.s[k], score[k] / l1, 1e-12);
}

TEST(CheckOptimality, RefutesTheNaiveStallPoint) {
    auto q = stall_instance(2.0);
    Eigen::VectorXd stall = naive_cd(q, Eigen::VectorXd::Zero(2)).beta;
    OptimalityReport r = check_optimality(q, stall);
    EXPECT_FALSE(r.optimal);
    auto inactive = std::find_if(r.violations.begin(), r.violations.end(),
                                 [](const Violation& v) { return v.kind == ViolationKind::inactive_split; });
    ASSERT_NE(inactive, r.violations.end());
    EXPECT_EQ(inactive->nodes, (std::vector<int>{0, 1}));
    EXPECT_GT(inactive->magnitude, 0.0);
    EXPECT_TRUE(check_optimality(q, Eigen::Vector2d(1, 1)).optimal);
}

TEST(CheckOptimality, NumericVariantAgreesOnSquaredLoss) {
    auto q = stall_instance(0.5);
    EXPECT_TRUE(check_optimality_numeric(q, Eigen::Vector2d(1.5, 0.5)).optimal);
    EXPECT_FALSE(check_optimality_numeric(q, Eigen::Vector2d(1.4, 0.5)).optimal);
    EXPECT_LT(certificate_residual(q, Eigen::Vector2d(1.5, 0.5)), 1e-9);
    EXPECT_GT(certificate_residual(q, Eigen::Vector2d(1.4, 0.5)), 0.05);
}

TEST(SmoothedOracle, HandExamples) {
    auto ls = FusedProblem::squared(Eigen::Matrix2d{{2, 1}, {0, 1}}, Eigen::Vector2d(3, 1), PenaltyGraph::chain(2), 0, 0);
    OracleResult a = smoothed_oracle(ls);
    EXPECT_NEAR(a.beta[0], 1.0, 1e-8);
    EXPECT_NEAR(a.beta[1], 1.0, 1e-8);
    EXPECT_LT(a.certified_gap, 1e-8);

    OracleResult b = smoothed_oracle(stall_instance(0.5));
    EXPECT_NEAR(b.beta[0], 1.5, 1e-6);
    EXPECT_NEAR(b.beta[1], 0.5, 1e-6);
    EXPECT_NEAR(b.objective, 0.75, b.certified_gap + 1e-9);

    OracleResult c = smoothed_oracle(stall_instance(2.0));
    EXPECT_NEAR(c.objective, 1.0, c.certified_gap + 1e-9);
    // At a kink the smoothed curvature is M, so gradient rounding can keep the
    // norm above grad_tol; the shortfall must show up in the gap instead.
    EXPECT_TRUE(std::isfinite(c.certified_gap));
    EXPECT_LT(c.certified_gap, 1e-6) << c.grad_norm;
    if (!c.converged) {
        EXPECT_GT(c.grad_norm, 1e-10);
    }
}

TEST(SmoothedOracle, SandwichesTheExactObjective) {
    ft::Rng rng(95);
    for (int t = 0; t < 20; ++t) {
        int n = 10, p = 5;
        auto q = FusedProblem::squared(ft::random_matrix(rng, n, p), ft::random_vector(rng, n, 2.0),
                                       ft::random_connected_graph(rng, p, 6), 0.3, 0.4);
        OracleResult o = smoothed_oracle(q);
        Solution s = solve_exact(q, Eigen::VectorXd::Zero(p));
        EXPECT_LE(s.objective, o.objective + 1e-12);
        EXPECT_LE(o.objective - s.objective, o.certified_gap + 1e-6);
        EXPECT_GE(o.smoothed_objective, 0.0);
    }
}

TEST(SmoothedOracle, StaysTightWhenTheDesignIsWide) {
    // n < p leaves flat directions in the data term; the gap must stay small.
    ft::Rng rng(96);
    for (int t = 0; t < 20; ++t) {
        int p = ft::uniform_int(rng, 6, 10), n = ft::uniform_int(rng, 3, p - 1);
        auto q = FusedProblem::squared(ft::random_matrix(rng, n, p), ft::random_vector(rng, n, 3.0),
                                       ft::random_connected_graph(rng, p, 2 * p, true), ft::uniform_real(rng, 0.5, 5),
                                       ft::uniform_real(rng, 0, 1));
        OracleResult o = smoothed_oracle(q);
        Solution s = solve_exact(q, Eigen::VectorXd::Zero(p));
        EXPECT_LT(o.certified_gap, 1e-5) << "trial " << t << " grad " << o.grad_norm;
        EXPECT_LE(std::abs(o.objective - s.objective), o.certified_gap + 1e-8);
    }
}
