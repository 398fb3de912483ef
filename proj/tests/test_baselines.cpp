#include <gtest/gtest.h>

#include "support.hpp"
#include "vfo/baselines.hpp"

using namespace vfo;
using namespace vfo::test;

namespace {

/// robot 0 -- poa 1 -- server 2 with a 100 Mbps radio link.
HardwareGraph radio_graph() { return minimal_graph(8.0); }

RadioState single_radio(double sigma) {
    RadioState r;
    r.noise = 1.0;
    r.sigma[{NodeId{0}, NodeId{1}}] = sigma;
    return r;
}

std::set<ViolationKind> kinds(const std::vector<Violation>& v) {
    std::set<ViolationKind> out;
    for (const auto& x : v) out.insert(x.kind);
    return out;
}

} // namespace

TEST(LatencyAgnostic, WarehouseR5StaysOnTheCloud) {
    const auto sc = warehouse();
    const auto radio = warehouse_radio_at(sc, 100.0);
    const auto& s = sc.services.front();
    const NodeId robot = by_name(sc.graph, "r1");
    const auto e = latency_agnostic_solve(sc.graph, s, robot, radio);
    EXPECT_EQ(e.placements.at(s.vfs[1].id), by_name(sc.graph, "Cloud"));
    EXPECT_EQ(e.attachment.at(robot), by_name(sc.graph, "R5"));
    EXPECT_NEAR(delay_report(sc.graph, s, e).total, 27.0 + 1.0 / 50.0, 1e-9);
}

TEST(LatencyAgnostic, WarehouseR1MeetsTheDeadline) {
    const auto sc = warehouse();
    const auto radio = warehouse_radio_at(sc, 0.0);
    const auto& s = sc.services.front();
    const auto e = latency_agnostic_solve(sc.graph, s, by_name(sc.graph, "r1"), radio);
    EXPECT_EQ(e.placements.at(s.vfs[1].id), by_name(sc.graph, "Cloud"));
    EXPECT_NEAR(delay_report(sc.graph, s, e).total, 9.0 + 1.0 / 50.0, 1e-9);
    EXPECT_TRUE(check_embedding(sc.graph, sc.services, e, radio).empty());
}

TEST(LatencyAgnostic, WithoutCloudFallsToTheNextTier) {
    const CostTable k;
    const auto g = build_graph({robot_node(0), poa_node(1), server_node(2, Tier::NearEdge, 8, 40, k(Tier::NearEdge)),
                                server_node(3, Tier::FarEdge, 8, 40, k(Tier::FarEdge))},
                               {link(0, 1, 100), link(1, 2, 100, 1), link(1, 3, 100, 5)});
    const auto s = chain_service(0, NodeId{0}, 0, {2.0}, 10.0, 100.0);
    const auto e = latency_agnostic_solve(g, s, NodeId{0}, single_radio(3.0));
    EXPECT_EQ(e.placements.at(VfId{1}), NodeId{3});
}

TEST(LatencyAgnostic, FullServersRaise) {
    const auto g = radio_graph();
    const auto s = chain_service(0, NodeId{0}, 0, {20.0}, 10.0, 100.0);
    try {
        latency_agnostic_solve(g, s, NodeId{0}, single_radio(3.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoFeasibleCapacity);
    }
}

TEST(RadioAgnostic, LowSnrOverloadsTheChannel) {
    const auto g = radio_graph();
    const auto s = chain_service(0, NodeId{0}, 0, {4.0}, 50.0, 100.0);
    const auto radio = single_radio(0.1); // T = 100 log2(1.1), about 13.8 Mbps
    const auto e = radio_agnostic_solve(g, s, NodeId{0}, radio);
    EXPECT_EQ(e.attachment.at(NodeId{0}), NodeId{1});
    EXPECT_EQ(kinds(check_embedding(g, {s}, e, radio)), std::set<ViolationKind>{ViolationKind::WirelessCapacity});
    EXPECT_THROW(place_service(g, s, NodeId{0}, radio), Error);
}

TEST(RadioAgnostic, NoSignalStillAttaches) {
    const auto g = radio_graph();
    const auto s = chain_service(0, NodeId{0}, 0, {4.0}, 50.0, 100.0);
    const auto radio = single_radio(0.0);
    const auto e = radio_agnostic_solve(g, s, NodeId{0}, radio);
    EXPECT_EQ(e.attachment.at(NodeId{0}), NodeId{1});
    const auto v = check_embedding(g, {s}, e, radio);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v.front().kind, ViolationKind::WirelessCapacity);
    EXPECT_DOUBLE_EQ(v.front().bound, 0.0);
}

TEST(RadioAgnostic, WarehouseStartIsDisconnected) {
    const auto sc = warehouse();
    const auto radio = warehouse_radio_at(sc, 0.0);
    const auto e = radio_agnostic_solve(sc.graph, sc.services, radio);
    EXPECT_EQ(e.attachment.at(by_name(sc.graph, "r1")), by_name(sc.graph, "R6"));
    EXPECT_TRUE(kinds(check_embedding(sc.graph, sc.services, e, radio)).count(ViolationKind::WirelessCapacity));
}

TEST(Properties, RadioAgnosticEqualsDlmdWhenTheChannelMatchesTheLink) {
    // sigma = N gives T = (1 - drop) * bandwidth, so both capacity views agree.
    Rng rng(53);
    int compared = 0;
    for (int i = 0; i < 300; ++i) {
        auto inst = random_instance(rng);
        for (auto& [k, s] : inst.radio.sigma) s = inst.radio.noise;
        Embedding dlmd;
        try {
            dlmd = place_services(inst.graph, inst.services, inst.radio);
        } catch (const Error&) {
            continue;
        }
        EXPECT_EQ(radio_agnostic_solve(inst.graph, inst.services, inst.radio), dlmd);
        ++compared;
    }
    EXPECT_GT(compared, 100);
}

TEST(Properties, LatencyAgnosticNeverCostsMoreThanDlmd) {
    Rng rng(59);
    int compared = 0;
    for (int i = 0; i < 500; ++i) {
        const auto inst = random_instance(rng);
        Embedding dlmd, cheap;
        try {
            dlmd = place_services(inst.graph, inst.services, inst.radio);
            cheap = latency_agnostic_solve(inst.graph, inst.services, inst.radio);
        } catch (const Error&) {
            continue;
        }
        EXPECT_LE(objective(inst.graph, cheap), objective(inst.graph, dlmd) + 1e-12);
        ++compared;
    }
    EXPECT_GT(compared, 100);
}
