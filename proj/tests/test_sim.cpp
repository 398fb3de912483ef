#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "vfo/report.hpp"
#include "vfo/sim.hpp"

using namespace vfo;
using namespace vfo::test;

namespace {

MobilityTrace line_trace() {
    MobilityTrace tr;
    tr.robot = NodeId{0};
    tr.step = 1.0;
    tr.duration = 10.0;
    tr.waypoints = {{0.0, 0.0, 0.0}, {4.0, 8.0, 0.0}, {8.0, 8.0, 4.0}};
    return tr;
}

std::string episode_csv(const Scenario& sc, const EpisodeMetrics& m) {
    std::ostringstream out;
    write_episode_csv(out, sc, m);
    return out.str();
}

} // namespace

TEST(Trace, InterpolatesAndClamps) {
    const auto tr = line_trace();
    EXPECT_EQ(tr.position_at(-1.0), (Position{0.0, 0.0}));
    EXPECT_EQ(tr.position_at(2.0), (Position{4.0, 0.0}));
    EXPECT_EQ(tr.position_at(4.0), (Position{8.0, 0.0}));
    EXPECT_EQ(tr.position_at(6.0), (Position{8.0, 2.0}));
    EXPECT_EQ(tr.position_at(100.0), (Position{8.0, 4.0}));
}

TEST(Trace, TimesStopBeforeTheDuration) {
    auto tr = line_trace();
    EXPECT_EQ(tr.times(), (std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
    tr.step = 3.0;
    EXPECT_EQ(tr.times(), (std::vector<double>{0, 3, 6, 9}));
    EXPECT_EQ(warehouse().trace->times().size(), 200u);
}

TEST(Trace, ValidationRejectsBadTraces) {
    auto tr = line_trace();
    tr.waypoints[2].t = 4.0;
    EXPECT_THROW(tr.validate(), Error);
    tr = line_trace();
    tr.step = 0.0;
    EXPECT_THROW(tr.validate(), Error);
    tr = line_trace();
    tr.waypoints.clear();
    EXPECT_THROW(tr.validate(), Error);
}

TEST(Signal, PathLossAndTable) {
    SignalModel m;
    m.reference_power = 8.0;
    m.exponent = 3.0;
    m.poa_power[NodeId{4}] = 27.0;
    EXPECT_DOUBLE_EQ(m.path_loss(NodeId{1}, 0.0), 8.0);
    EXPECT_DOUBLE_EQ(m.path_loss(NodeId{1}, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(m.path_loss(NodeId{4}, 2.0), 1.0);

    Scenario sc;
    sc.graph = minimal_graph();
    sc.has_signal_model = true;
    sc.signal.mode = SignalModel::Mode::Table;
    sc.signal.table = {{{NodeId{1}, 2.0}}, {{NodeId{1}, 5.0}}};
    EXPECT_DOUBLE_EQ(radio_at(sc, 0, std::nullopt).signal(NodeId{0}, NodeId{1}), 2.0);
    EXPECT_DOUBLE_EQ(radio_at(sc, 1, std::nullopt).signal(NodeId{0}, NodeId{1}), 5.0);
    EXPECT_DOUBLE_EQ(radio_at(sc, 9, std::nullopt).signal(NodeId{0}, NodeId{1}), 5.0); // last row repeats
}

TEST(Episode, RequiresATrace) {
    auto sc = warehouse();
    sc.trace.reset();
    try {
        run_episode(sc, Algorithm::Dlmd);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ScenarioInvalid);
    }
    sc = warehouse();
    sc.stress = 1.5;
    EXPECT_THROW(run_episode(sc, Algorithm::Dlmd), Error);
}

TEST(Warehouse, DlmdMeetsTheDeadlineEverywhere) {
    const auto sc = warehouse();
    const auto m = run_episode(sc, Algorithm::Dlmd);
    ASSERT_EQ(m.steps.size(), 200u);
    for (const auto& s : m.steps) {
        EXPECT_TRUE(s.feasible) << "t=" << s.t << " " << s.error;
        EXPECT_LE(s.delay, 15.0 + kTolerance) << "t=" << s.t;
    }
    EXPECT_DOUBLE_EQ(m.deadline_rate(), 1.0);
    EXPECT_DOUBLE_EQ(m.connectivity_rate(), 1.0);

    // Handovers walk the PoAs in order.
    std::vector<std::string> visited;
    for (const auto& s : m.steps) {
        const auto name = sc.graph.node(*s.attachment).name;
        if (visited.empty() || visited.back() != name) visited.push_back(name);
    }
    EXPECT_EQ(visited, (std::vector<std::string>{"R1", "R2", "R3", "R4", "R5", "R6"}));
}

TEST(Warehouse, LatencyAgnosticMissesTheDeadlineOnFarPoas) {
    const auto sc = warehouse();
    const auto m = run_episode(sc, Algorithm::LatencyAgnostic);
    const NodeId r5 = by_name(sc.graph, "R5");
    const NodeId r6 = by_name(sc.graph, "R6");
    int far = 0;
    for (const auto& s : m.steps) {
        if (!s.solved || (*s.attachment != r5 && *s.attachment != r6)) continue;
        EXPECT_NEAR(s.delay, 27.0 + 1.0 / 50.0, 1e-9) << "t=" << s.t;
        EXPECT_FALSE(s.deadline_met);
        ++far;
    }
    EXPECT_GT(far, 0);
    EXPECT_LT(m.deadline_rate(), 1.0);
}

TEST(Warehouse, RadioAgnosticLosesConnectivityAwayFromTheStrongPoa) {
    const auto sc = warehouse();
    const auto m = run_episode(sc, Algorithm::RadioAgnostic);
    const NodeId r6 = by_name(sc.graph, "R6");
    for (const auto& s : m.steps) {
        ASSERT_TRUE(s.solved) << "t=" << s.t;
        EXPECT_EQ(*s.attachment, r6);
        EXPECT_EQ(s.connected, s.t >= 125.0) << "t=" << s.t;
    }
    EXPECT_DOUBLE_EQ(m.connectivity_rate(), 75.0 / 200.0);
}

TEST(Warehouse, OracleMatchesDlmdCost) {
    const auto sc = warehouse();
    const auto a = run_episode(sc, Algorithm::Dlmd);
    const auto b = run_episode(sc, Algorithm::Oracle);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        EXPECT_EQ(a.steps[k].objective, b.steps[k].objective) << "t=" << a.steps[k].t;
    }
}

TEST(Episode, CountersMatchAnIndependentRecount) {
    const auto sc = warehouse();
    for (const auto algo : {Algorithm::Dlmd, Algorithm::LatencyAgnostic, Algorithm::RadioAgnostic}) {
        const auto m = run_episode(sc, algo);
        std::size_t migrations = 0, handovers = 0;
        const StepRecord* prev = nullptr;
        for (const auto& s : m.steps) {
            if (!s.solved) continue;
            if (prev) {
                migrations += s.placements != prev->placements;
                handovers += s.attachment != prev->attachment;
            }
            prev = &s;
        }
        EXPECT_EQ(m.migrations, migrations) << to_string(algo);
        EXPECT_EQ(m.handovers, handovers) << to_string(algo);
        EXPECT_LE(m.migrations_succeeded, m.migrations_needed);
    }
    const auto m = run_episode(sc, Algorithm::Dlmd);
    EXPECT_EQ(m.migrations, 3u);
    EXPECT_EQ(m.handovers, 5u);
    EXPECT_DOUBLE_EQ(m.migration_success_rate(), 1.0);
}

TEST(Episode, Deterministic) {
    const auto sc = warehouse();
    for (const auto algo : {Algorithm::Dlmd, Algorithm::LatencyAgnostic, Algorithm::RadioAgnostic}) {
        EXPECT_EQ(episode_csv(sc, run_episode(sc, algo)), episode_csv(sc, run_episode(sc, algo)));
    }
}

TEST(Episode, ShadowingFollowsTheSeed) {
    auto sc = warehouse();
    sc.signal.shadowing_db = 4.0;
    const auto a = episode_csv(sc, run_episode(sc, Algorithm::Dlmd, 5));
    EXPECT_EQ(a, episode_csv(sc, run_episode(sc, Algorithm::Dlmd, 5)));
    EXPECT_NE(a, episode_csv(sc, run_episode(sc, Algorithm::Dlmd, 6)));
}

TEST(Episode, FailedSolvesAreRecorded) {
    auto sc = warehouse();
    sc.services.front().deadline = 2.0;
    const auto m = run_episode(sc, Algorithm::Dlmd);
    for (const auto& s : m.steps) {
        EXPECT_FALSE(s.solved);
        EXPECT_EQ(s.error, "NoFeasiblePlacement");
        EXPECT_TRUE(s.connected); // coverage exists, only the placement failed
    }
    EXPECT_DOUBLE_EQ(m.deadline_rate(), 0.0);
    EXPECT_EQ(m.migrations, 0u);
}

TEST(Summarize, MeanAndInterval) {
    EXPECT_EQ(summarize({}), (Stat{0.0, 0.0}));
    EXPECT_EQ(summarize({4.0}), (Stat{4.0, 0.0}));
    const auto s = summarize({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_NEAR(s.ci90, 1.6448536269514722 / std::sqrt(3.0), 1e-15);
}

TEST(Summarize, Median) {
    EXPECT_EQ(median({}), 0.0);
    EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
}

TEST(Stress, MixSeedSeparatesStreams) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a) {
        for (std::uint64_t b = 0; b < 20; ++b) seen.insert(mix_seed(a, b));
    }
    EXPECT_EQ(seen.size(), 400u);
    EXPECT_EQ(mix_seed(3, 4), mix_seed(3, 4));
}

TEST(Stress, TourVisitsEveryPoa) {
    TopologyParams prm;
    prm.p = minimal_feasible_p(48);
    const auto g = generate(prm);
    const NodeId robot = g.nodes_of(NodeKind::Robot).front();
    const auto tr = poa_tour(g, robot, 5);
    EXPECT_NO_THROW(tr.validate());
    ASSERT_EQ(tr.waypoints.size(), 12u);
    EXPECT_EQ(tr.times().size(), 56u);
    const auto poas = g.poas_of(robot);
    for (std::size_t i = 0; i < poas.size(); ++i) {
        EXPECT_EQ(tr.position_at(static_cast<double>(5 * i)), *g.node(poas[i]).position);
    }
}

TEST(Stress, FullLoadIsInfeasible) {
    StressConfig cfg;
    cfg.sizes = {{48, minimal_feasible_p(48)}};
    cfg.levels = {1.0};
    cfg.trials = 1;
    const auto rows = stress_sweep(cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].feasibility_rate.mean, 0.0);
    EXPECT_EQ(rows[0].deadline_rate.mean, 0.0);
}

TEST(Stress, SmallSweepShape) {
    StressConfig cfg;
    cfg.sizes = {{48, minimal_feasible_p(48)}};
    cfg.levels = {0.0, 0.4, 0.8};
    cfg.trials = 2;
    const auto rows = stress_sweep(cfg);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].n, 48u);
        EXPECT_EQ(rows[i].stress, cfg.levels[i]);
        EXPECT_EQ(rows[i].trials, 2u);
        EXPECT_EQ(rows[i].runtimes_ms.size(), 2u * 56u);
        EXPECT_GE(rows[i].deadline_rate.mean, 0.0);
        EXPECT_LE(rows[i].deadline_rate.mean, 1.0);
    }
    EXPECT_GE(rows[0].feasibility_rate.mean, rows[2].feasibility_rate.mean);
    EXPECT_EQ(rows.front().deadline_rate, stress_sweep(cfg).front().deadline_rate);
}

TEST(Stress, BadConfigurationsAreDomainErrors) {
    StressConfig cfg;
    cfg.levels = {1.2};
    EXPECT_THROW(stress_sweep(cfg), Error);
    cfg.levels = {0.0};
    cfg.trials = 0;
    EXPECT_THROW(stress_sweep(cfg), Error);
}
