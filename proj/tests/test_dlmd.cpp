#include <gtest/gtest.h>

#include "support.hpp"
#include "vfo/dlmd.hpp"

using namespace vfo;
using namespace vfo::test;

namespace {

/// One robot linked to `poas` PoAs (ids 1..), all wired to server `poas + 1`.
HardwareGraph fan_graph(const std::vector<double>& wireless_bw, const std::vector<double>& wireless_delay) {
    std::vector<Node> nodes{robot_node(0)};
    std::vector<Link> links;
    const auto server = static_cast<std::uint32_t>(wireless_bw.size() + 1);
    for (std::uint32_t i = 1; i < server; ++i) {
        nodes.push_back(poa_node(i));
        links.push_back(link(0, i, wireless_bw[i - 1], wireless_delay[i - 1]));
        links.push_back(link(i, server, 1000.0, 1.0));
    }
    nodes.push_back(server_node(server, Tier::Cloud, 8.0, 50.0, 1.0));
    return build_graph(std::move(nodes), std::move(links));
}

RadioState flat_radio(const HardwareGraph& g, double sigma) {
    RadioState r;
    r.noise = 1.0;
    for (const auto poa : g.poas_of(NodeId{0})) r.sigma[{NodeId{0}, poa}] = sigma;
    return r;
}

} // namespace

TEST(PrunePoas, KeepsPoasThatCarryTheDemand) {
    const auto g = fan_graph({100.0}, {0.0});
    const auto radio = flat_radio(g, 3.0); // T = 200
    EXPECT_EQ(prune_poas(g, NodeId{0}, 150.0, radio), std::vector<NodeId>{NodeId{1}});
    EXPECT_EQ(prune_poas(g, NodeId{0}, 200.0, radio), std::vector<NodeId>{NodeId{1}});
    try {
        prune_poas(g, NodeId{0}, 250.0, radio);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoCoverage);
    }
}

TEST(PrunePoas, NoSignalMeansNoCoverage) {
    const auto g = fan_graph({100.0, 100.0}, {0.0, 0.0});
    try {
        prune_poas(g, NodeId{0}, 1.0, flat_radio(g, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoCoverage);
    }
}

TEST(PrunePoas, MonotoneInSignal) {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        const auto inst = random_instance(rng);
        const NodeId robot{0};
        const double demand = rng.uniform(1.0, 200.0);
        auto stronger = inst.radio;
        for (auto& [k, s] : stronger.sigma) s += rng.uniform(0.0, 5.0);
        std::vector<NodeId> weak_set, strong_set;
        try {
            weak_set = prune_poas(inst.graph, robot, demand, inst.radio);
        } catch (const Error&) {
        }
        try {
            strong_set = prune_poas(inst.graph, robot, demand, stronger);
        } catch (const Error&) {
        }
        for (const auto p : weak_set) {
            EXPECT_NE(std::find(strong_set.begin(), strong_set.end(), p), strong_set.end());
        }
    }
}

TEST(TauCandidates, SingleLinkAddsInverseBandwidth) {
    const auto g = build_graph({robot_node(0), poa_node(1), server_node(2, Tier::Cloud, 4.0, 10.0, 1.0)},
                               {link(0, 1, 100.0), link(1, 2, 1.0, 0.0)});
    const auto c = tau_candidates(g, NodeId{1}, {NodeId{2}});
    ASSERT_EQ(c.size(), 1u);
    EXPECT_DOUBLE_EQ(c.front().tau, 2.0);
    EXPECT_EQ(c.front().path, (Route{NodeId{1}, NodeId{2}}));
}

TEST(TauCandidates, TiesAreBrokenById) {
    const auto g = build_graph({robot_node(0), poa_node(1), switch_node(2), server_node(3, Tier::Cloud, 4, 10, 1),
                                server_node(4, Tier::Cloud, 4, 10, 1)},
                               {link(0, 1, 100.0), link(1, 2, 100.0, 1.0), link(2, 4, 100.0, 2.0),
                                link(2, 3, 100.0, 2.0)});
    const auto c = tau_candidates(g, NodeId{1}, {NodeId{4}, NodeId{3}});
    ASSERT_EQ(c.size(), 2u);
    EXPECT_DOUBLE_EQ(c[0].tau, c[1].tau);
    EXPECT_EQ(c[0].node, NodeId{3});
    EXPECT_EQ(c[1].node, NodeId{4});
}

TEST(TauCandidates, SkipsNodesWithoutCompute) {
    const auto g = minimal_graph(0.0);
    EXPECT_TRUE(tau_candidates(g, NodeId{1}, {NodeId{2}}).empty());
}

TEST(TauCandidates, WarehouseCloudBeatsNearEdgeFromR1) {
    const auto sc = warehouse();
    const auto& g = sc.graph;
    const NodeId r1 = by_name(g, "R1");
    const NodeId cloud = by_name(g, "Cloud");
    const NodeId near = by_name(g, "nEdge");
    const auto c = tau_candidates(g, r1, {cloud, near});
    ASSERT_EQ(c.size(), 2u);
    // Hand evaluation: kappa + 1 / 1000 Mbps + table delay.
    const double cloud_tau = g.node(cloud).cost + 1.0 / 1000.0 + 9.0;
    const double near_tau = g.node(near).cost + 1.0 / 1000.0 + 3.0;
    EXPECT_EQ(c[0].node, cloud);
    EXPECT_NEAR(c[0].tau, cloud_tau, 1e-12);
    EXPECT_NEAR(c[1].tau, near_tau, 1e-12);
}

TEST(SelectPoa, PrefersCapacityThenDelay) {
    {
        const auto g = fan_graph({100.0, 100.0}, {1.0, 1.0});
        auto radio = flat_radio(g, 3.0);
        radio.sigma[{NodeId{0}, NodeId{2}}] = 1.0; // T = {200, 100}
        EXPECT_EQ(select_poa(g, NodeId{0}, {NodeId{1}, NodeId{2}}, radio), NodeId{1});
    }
    {
        const auto g = fan_graph({100.0, 100.0}, {1.0, 5.0});
        EXPECT_EQ(select_poa(g, NodeId{0}, {NodeId{2}, NodeId{1}}, flat_radio(g, 3.0)), NodeId{1});
    }
    {
        const auto g = fan_graph({100.0, 100.0}, {1.0, 1.0});
        EXPECT_EQ(select_poa(g, NodeId{0}, {NodeId{2}}, flat_radio(g, 3.0)), NodeId{2});
        EXPECT_EQ(select_poa(g, NodeId{0}, {NodeId{2}, NodeId{1}}, flat_radio(g, 3.0)), NodeId{1});
    }
}

TEST(PlaceService, WarehouseR1SegmentUsesTheCloud) {
    const auto sc = warehouse();
    const auto radio = warehouse_radio_at(sc, 0.0);
    const auto& s = sc.services.front();
    const NodeId robot = by_name(sc.graph, "r1");
    const auto e = place_service(sc.graph, s, robot, radio);
    EXPECT_EQ(e.placements.at(s.vfs[1].id), by_name(sc.graph, "Cloud"));
    EXPECT_EQ(e.attachment.at(robot), by_name(sc.graph, "R1"));
    EXPECT_NEAR(delay_report(sc.graph, s, e).total, 9.0 + 1.0 / 50.0, 1e-9);
    EXPECT_TRUE(check_embedding(sc.graph, sc.services, e, radio).empty());
}

TEST(PlaceService, WarehouseR5SegmentMigratesToFarEdge) {
    const auto sc = warehouse();
    const auto radio = warehouse_radio_at(sc, 100.0);
    const auto& s = sc.services.front();
    const NodeId robot = by_name(sc.graph, "r1");
    const auto e = place_service(sc.graph, s, robot, radio);
    EXPECT_EQ(e.attachment.at(robot), by_name(sc.graph, "R5"));
    EXPECT_EQ(e.placements.at(s.vfs[1].id), by_name(sc.graph, "fEdge"));
    EXPECT_NEAR(delay_report(sc.graph, s, e).total, 12.0 + 1.0 / 50.0, 1e-9);
}

TEST(PlaceService, PinnedOnlyServiceStillAttaches) {
    const auto g = minimal_graph();
    ServiceSpec s;
    s.id = ServiceId{0};
    s.deadline = 10.0;
    s.vfs = {{VfId{0}, "driver", 1.0, NodeId{0}}};
    RadioState radio;
    radio.sigma[{NodeId{0}, NodeId{1}}] = 3.0;
    const auto e = place_service(g, s, NodeId{0}, radio);
    EXPECT_EQ(e.placements, (std::map<VfId, NodeId>{{VfId{0}, NodeId{0}}}));
    EXPECT_TRUE(e.routes.empty());
    EXPECT_EQ(e.attachment.at(NodeId{0}), NodeId{1});
}

TEST(PlaceService, DeadlineNoServerCanMeetFails) {
    const auto sc = warehouse();
    auto services = sc.services;
    services.front().deadline = 2.0; // below the 3 ms of the nearest server
    try {
        place_services(sc.graph, services, warehouse_radio_at(sc, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoFeasiblePlacement);
    }
}

TEST(Properties, OutputsAlwaysPassCheckEmbedding) {
    Rng rng(13);
    int solved = 0;
    for (int i = 0; i < 500; ++i) {
        const auto inst = random_instance(rng);
        try {
            const auto e = place_services(inst.graph, inst.services, inst.radio);
            EXPECT_TRUE(check_embedding(inst.graph, inst.services, e, inst.radio).empty());
            EXPECT_TRUE(e.attachment.count(inst.idle_robot));
            ++solved;
        } catch (const Error& e) {
            const auto c = e.code();
            EXPECT_TRUE(c == Errc::NoFeasiblePlacement || c == Errc::NoCoverage || c == Errc::Infeasible)
                << e.what();
        }
    }
    EXPECT_GT(solved, 150);
}

TEST(Properties, Deterministic) {
    Rng a(19);
    Rng b(19);
    for (int i = 0; i < 100; ++i) {
        const auto x = random_instance(a);
        const auto y = random_instance(b);
        Embedding ex, ey;
        bool thrown_x = false, thrown_y = false;
        try {
            ex = place_services(x.graph, x.services, x.radio);
        } catch (const Error&) {
            thrown_x = true;
        }
        try {
            ey = place_services(y.graph, y.services, y.radio);
        } catch (const Error&) {
            thrown_y = true;
        }
        EXPECT_EQ(thrown_x, thrown_y);
        EXPECT_EQ(ex, ey);
    }
}

TEST(Properties, UniformLinksPreferTheCloud) {
    Rng rng(31);
    const CostTable k;
    for (int i = 0; i < 100; ++i) {
        // robot 0 - poa 1 - switch 2 - {near 3, far 4, cloud 5}, identical wired links.
        const double bw = rng.uniform(100.0, 1000.0);
        const double d = rng.uniform(0.1, 3.0);
        const auto g = build_graph({robot_node(0), poa_node(1), switch_node(2),
                                    server_node(3, Tier::NearEdge, 8, 40, k(Tier::NearEdge)),
                                    server_node(4, Tier::FarEdge, 8, 40, k(Tier::FarEdge)),
                                    server_node(5, Tier::Cloud, 8, 40, k(Tier::Cloud))},
                                   {link(0, 1, 200.0), link(1, 2, bw, d), link(2, 3, bw, d), link(2, 4, bw, d),
                                    link(2, 5, bw, d)});
        const auto s = chain_service(0, NodeId{0}, 0, {rng.uniform(0.5, 4.0)}, rng.uniform(1.0, 20.0), 100.0);
        RadioState radio;
        radio.sigma[{NodeId{0}, NodeId{1}}] = 3.0;
        const auto e = place_service(g, s, NodeId{0}, radio);
        EXPECT_EQ(e.placements.at(VfId{1}), NodeId{5});
    }
}
