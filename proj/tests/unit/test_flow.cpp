#include <gtest/gtest.h>

#include <fusedlasso/error.hpp>
#include <fusedlasso/flow.hpp>

#include "oracles.hpp"

using namespace fusedlasso;
namespace ft = fusedlasso::testing;

TEST(MaxFlow, ClassicSixNodeNetwork) {
    // CLRS-style example with max flow 23.
    FlowNetwork net(6);
    std::vector<ft::Arc> arcs{{0, 1, 16}, {0, 2, 13}, {1, 3, 12}, {2, 1, 4}, {2, 4, 14},
                              {3, 2, 9},  {3, 5, 20}, {4, 3, 7},  {4, 5, 4}};
    for (const auto& a : arcs) net.add_arc(a.from, a.to, a.capacity);
    EXPECT_NEAR(max_flow(net, 0, 5), 23.0, 1e-12);
    EXPECT_NEAR(ft::min_cut_enumerate(6, arcs, 0, 5), 23.0, 1e-12);
}

TEST(MaxFlow, DisconnectedSinkGivesZero) {
    FlowNetwork net(3);
    net.add_arc(0, 1, 5.0);
    EXPECT_EQ(max_flow(net, 0, 2), 0.0);
    auto r = residual_reachability(net, 0, 2);
    EXPECT_EQ(r.from_source, (std::vector<int>{1}));
    EXPECT_TRUE(r.to_sink.empty());
}

TEST(MaxFlow, FlowIsConservedAndFeasible) {
    ft::Rng rng(41);
    for (int t = 0; t < 100; ++t) {
        int nodes = ft::uniform_int(rng, 2, 12);
        FlowNetwork net(nodes);
        int m = ft::uniform_int(rng, 1, 3 * nodes);
        for (int i = 0; i < m; ++i) {
            int a = ft::uniform_int(rng, 0, nodes - 1), b = ft::uniform_int(rng, 0, nodes - 1);
            if (a == b) continue;
            net.add_arc(a, b, ft::uniform_real(rng, 0, 10), ft::uniform_int(rng, 0, 1) ? ft::uniform_real(rng, 0, 10) : 0.0);
        }
        double value = max_flow(net, 0, nodes - 1);
        std::vector<double> excess(static_cast<std::size_t>(nodes), 0.0);
        for (int a = 0; a < net.arcs(); ++a) {
            EXPECT_LE(net.flow(a), net.capacity(a) + 1e-9);
            EXPECT_DOUBLE_EQ(net.flow(a ^ 1), -net.flow(a));
            if (net.flow(a) > 0) {
                excess[net.head(a)] += net.flow(a);
                excess[net.tail(a)] -= net.flow(a);
            }
        }
        for (int v = 1; v + 1 < nodes; ++v) EXPECT_NEAR(excess[v], 0.0, 1e-9);
        EXPECT_NEAR(excess[nodes - 1], value, 1e-9);
    }
}

TEST(MaxFlow, EqualsEnumeratedMinCutOnSmallNetworks) {
    ft::Rng rng(42);
    for (int t = 0; t < 300; ++t) {
        int nodes = ft::uniform_int(rng, 2, 12);
        FlowNetwork net(nodes);
        std::vector<ft::Arc> arcs;
        int m = ft::uniform_int(rng, 0, 3 * nodes);
        for (int i = 0; i < m; ++i) {
            int a = ft::uniform_int(rng, 0, nodes - 1), b = ft::uniform_int(rng, 0, nodes - 1);
            if (a == b) continue;
            double c = ft::uniform_int(rng, 0, 3) == 0 ? 0.0 : ft::uniform_real(rng, 0, 5);
            net.add_arc(a, b, c);
            arcs.push_back({a, b, c});
        }
        int s = ft::uniform_int(rng, 0, nodes - 1);
        int sink = (s + ft::uniform_int(rng, 1, nodes - 1)) % nodes;
        double flow = max_flow(net, s, sink);
        ASSERT_NEAR(flow, ft::min_cut_enumerate(nodes, arcs, s, sink), 1e-9 * (1.0 + flow)) << "trial " << t;
        // The source side of the residual graph is a minimum cut.
        auto reach = residual_reachability(net, s, sink);
        std::vector<bool> side(static_cast<std::size_t>(nodes), false);
        side[s] = true;
        for (int v : reach.from_source) side[v] = true;
        EXPECT_FALSE(side[sink]);
        double cut = 0.0;
        for (const auto& a : arcs) {
            if (side[a.from] && !side[a.to]) cut += a.capacity;
        }
        EXPECT_NEAR(cut, flow, 1e-9 * (1.0 + flow));
    }
}

TEST(MaxFlow, RejectsInvalidArcs) {
    FlowNetwork net(2);
    EXPECT_THROW(net.add_arc(0, 2, 1.0), Error);
    EXPECT_THROW(net.add_arc(0, 1, -1.0), Error);
    EXPECT_THROW(net.add_arc(0, 1, std::numeric_limits<double>::infinity()), Error);
}
