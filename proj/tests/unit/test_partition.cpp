#include <gtest/gtest.h>

#include <fusedlasso/error.hpp>
#include <fusedlasso/fusion.hpp>
#include <fusedlasso/partition.hpp>

#include "oracles.hpp"

using namespace fusedlasso;
namespace ft = fusedlasso::testing;

TEST(Partition, GroupsEqualConnectedValues) {
    auto g = PenaltyGraph::chain(6);
    Eigen::VectorXd beta(6);
    beta << 1.0, 1.0, 0.0, 2.0, 2.0, 1.0;
    auto part = build_partition(g, beta);
    ASSERT_EQ(part.size(), 4);
    EXPECT_EQ(part.sets[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(part.sets[1], (std::vector<int>{2}));
    EXPECT_EQ(part.sets[2], (std::vector<int>{3, 4}));
    // Equal value but not adjacent to the first run: its own set.
    EXPECT_EQ(part.sets[3], (std::vector<int>{5}));
    EXPECT_EQ(part.set_of[4], 2);
    EXPECT_DOUBLE_EQ(part.values[2], 2.0);
}

TEST(Partition, NearlyEqualValuesFuseAndTakeSmallestMemberValue) {
    auto g = PenaltyGraph::chain(3);
    Eigen::Vector3d beta(1.0 + 1e-12, 1.0, 5.0);
    auto part = build_partition(g, beta);
    ASSERT_EQ(part.size(), 2);
    EXPECT_EQ(part.sets[0], (std::vector<int>{0, 1}));
    EXPECT_DOUBLE_EQ(part.values[0], 1.0 + 1e-12);
    auto snapped = snap_to_partition(beta, part);
    EXPECT_EQ(snapped[0], snapped[1]);
}

TEST(Partition, SetContainingExactZeroHasValueZero) {
    auto g = PenaltyGraph::chain(3);
    Eigen::Vector3d beta(1e-16, 0.0, 3.0);
    auto part = build_partition(g, beta);
    ASSERT_EQ(part.size(), 2);
    EXPECT_EQ(part.values[0], 0.0);
    EXPECT_EQ(snap_to_partition(beta, part)[0], 0.0);
}

TEST(Partition, EverySetIsConnectedAndCoversAllNodes) {
    ft::Rng rng(21);
    for (int t = 0; t < 200; ++t) {
        int p = ft::uniform_int(rng, 2, 15);
        auto g = ft::random_connected_graph(rng, p, 2 * p);
        Eigen::VectorXd beta(p);
        for (int k = 0; k < p; ++k) beta[k] = ft::uniform_int(rng, -1, 1);
        auto part = build_partition(g, beta);
        std::vector<int> seen(static_cast<std::size_t>(p), 0);
        for (int i = 0; i < part.size(); ++i) {
            EXPECT_EQ(induced_components(g, part.sets[i]).size(), 1u);
            for (int k : part.sets[i]) {
                ++seen[k];
                EXPECT_EQ(part.set_of[k], i);
                EXPECT_EQ(beta[k], part.values[i]);
            }
        }
        for (int s : seen) EXPECT_EQ(s, 1);
        // Maximality: an edge inside equal values never crosses sets.
        for (const auto& e : g.edges()) {
            if (beta[e.k] == beta[e.l]) {
                EXPECT_EQ(part.set_of[e.k], part.set_of[e.l]);
            }
        }
    }
}

TEST(Partition, FromSetsValidates) {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
    EXPECT_THROW(partition_from_sets(3, {{0, 1}}, zero), Error);
    EXPECT_THROW(partition_from_sets(3, {{0, 1}, {1, 2}}, zero), Error);
    EXPECT_THROW(partition_from_sets(3, {{0, 1}, {}, {2}}, zero), Error);
    auto part = partition_from_sets(3, {{2}, {1, 0}}, zero);
    EXPECT_EQ(part.sets[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(part.sets[1], (std::vector<int>{2}));
}
