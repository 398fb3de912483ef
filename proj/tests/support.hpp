// Shared fixtures: hand-built substrates and a random small-instance generator.

#ifndef VFO_TESTS_SUPPORT_HPP
#define VFO_TESTS_SUPPORT_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vfo/scenario_io.hpp"
#include "vfo/sim.hpp"
#include "vfo/topology.hpp"

namespace vfo::test {

inline std::string data_path(const std::string& file) { return std::string(VFO_DATA_DIR) + "/" + file; }

inline Scenario warehouse() { return load_scenario(data_path("warehouse.json")); }

inline NodeId by_name(const HardwareGraph& g, const std::string& name) {
    for (const auto& n : g.nodes()) {
        if (n.name == name) return n.id;
    }
    throw std::runtime_error("no node " + name);
}

/// Warehouse radio with the robot at x metres along its path.
inline RadioState warehouse_radio_at(const Scenario& sc, double x) { return radio_at(sc, 0, Position{x, 0.0}); }

inline Node robot_node(std::uint32_t id, double compute = 2.0, double rate = 10.0) {
    Node n;
    n.id = NodeId{id};
    n.name = "robot" + std::to_string(id);
    n.kind = NodeKind::Robot;
    n.compute = compute;
    n.rate = rate;
    return n;
}

inline Node poa_node(std::uint32_t id) {
    Node n;
    n.id = NodeId{id};
    n.name = "poa" + std::to_string(id);
    n.kind = NodeKind::PoA;
    return n;
}

inline Node switch_node(std::uint32_t id) {
    Node n;
    n.id = NodeId{id};
    n.name = "sw" + std::to_string(id);
    n.kind = NodeKind::Switch;
    return n;
}

inline Node server_node(std::uint32_t id, Tier tier, double compute, double rate, double cost) {
    Node n;
    n.id = NodeId{id};
    n.name = std::string(to_string(tier)) + std::to_string(id);
    n.kind = NodeKind::Server;
    n.tier = tier;
    n.compute = compute;
    n.rate = rate;
    n.cost = cost;
    return n;
}

inline Link link(std::uint32_t a, std::uint32_t b, double bw, double delay = 0.0, double queuing = 0.0,
                 double drop = 0.0) {
    Link l;
    l.a = NodeId{a};
    l.b = NodeId{b};
    l.bandwidth = bw;
    l.delay = delay;
    l.queuing = queuing;
    l.drop = drop;
    return l;
}

/// robot 0 -- poa 1 -- server 2.
inline HardwareGraph minimal_graph(double server_compute = 4.0) {
    return build_graph({robot_node(0), poa_node(1), server_node(2, Tier::Cloud, server_compute, 25.0, 1.0)},
                       {link(0, 1, 100.0), link(1, 2, 1000.0, 1.0)});
}

/// Robot-driver VF pinned on `robot` followed by offloadable VFs of the
/// given compute, chained with `demand`.
inline ServiceSpec chain_service(std::uint32_t sid, NodeId robot, std::uint32_t first_vf,
                                 const std::vector<double>& computes, double demand, double deadline) {
    ServiceSpec s;
    s.id = ServiceId{sid};
    s.name = "s" + std::to_string(sid);
    s.deadline = deadline;
    s.vfs.push_back({VfId{first_vf}, "v" + std::to_string(first_vf), 0.5, robot});
    for (std::size_t i = 0; i < computes.size(); ++i) {
        const VfId id{first_vf + static_cast<std::uint32_t>(i) + 1};
        s.vfs.push_back({id, "v" + std::to_string(id.value), computes[i], std::nullopt});
        s.vls.push_back({VfId{id.value - 1}, id, demand});
    }
    return s;
}

inline HardwareGraph rebuild(const HardwareGraph& g, const std::function<void(std::vector<Node>&)>& nodes_fn,
                             const std::function<void(std::vector<Link>&)>& links_fn = {}) {
    auto nodes = g.nodes();
    auto links = g.links();
    if (nodes_fn) nodes_fn(nodes);
    if (links_fn) links_fn(links);
    return build_graph(std::move(nodes), std::move(links));
}

struct Instance {
    HardwareGraph graph;
    std::vector<ServiceSpec> services;
    RadioState radio;
    NodeId idle_robot; // a robot that carries no service
};

/// Small random substrate: busy robots with one chain each, one idle robot,
/// 2-3 PoAs, 1-3 switches in a line, 2-4 servers of random tiers.
inline Instance random_instance(Rng& rng, std::size_t max_busy_robots = 2, std::size_t max_extra_vfs = 2) {
    const std::size_t busy = 1 + rng.index(max_busy_robots);
    const std::size_t poas = 2 + rng.index(2);
    const std::size_t switches = 1 + rng.index(3);
    const std::size_t servers = 2 + rng.index(3);
    const CostTable costs;

    std::vector<Node> nodes;
    std::vector<Link> links;
    std::uint32_t next = 0;
    std::vector<std::uint32_t> robot_ids, poa_ids, switch_ids, server_ids;
    for (std::size_t i = 0; i <= busy; ++i) {
        robot_ids.push_back(next);
        nodes.push_back(robot_node(next++, 2.0, 30.0));
    }
    for (std::size_t i = 0; i < poas; ++i) {
        poa_ids.push_back(next);
        nodes.push_back(poa_node(next++));
    }
    for (std::size_t i = 0; i < switches; ++i) {
        switch_ids.push_back(next);
        nodes.push_back(switch_node(next++));
    }
    for (std::size_t i = 0; i < servers; ++i) {
        const Tier t = static_cast<Tier>(rng.index(3));
        server_ids.push_back(next);
        nodes.push_back(server_node(next++, t, rng.uniform(2.0, 10.0), rng.uniform(20.0, 60.0), costs(t)));
    }
    for (std::size_t i = 1; i < switch_ids.size(); ++i) {
        links.push_back(link(switch_ids[i - 1], switch_ids[i], rng.uniform(50, 500), rng.uniform(0.1, 2.0)));
    }
    for (const auto p : poa_ids) {
        links.push_back(link(p, switch_ids[rng.index(switch_ids.size())], rng.uniform(50, 500), rng.uniform(0.1, 2.0),
                             rng.uniform() < 0.3 ? rng.uniform(0.0, 1.0) : 0.0));
    }
    for (const auto s : server_ids) {
        const auto a = switch_ids[rng.index(switch_ids.size())];
        links.push_back(link(s, a, rng.uniform(50, 500), rng.uniform(0.5, 6.0)));
        const auto b = switch_ids[rng.index(switch_ids.size())];
        if (b != a && rng.uniform() < 0.5) links.push_back(link(s, b, rng.uniform(50, 500), rng.uniform(0.5, 6.0)));
    }
    if (rng.uniform() < 0.5) {
        links.push_back(link(poa_ids.front(), server_ids.front(), rng.uniform(50, 500), rng.uniform(0.5, 3.0)));
    }
    RadioState radio;
    radio.noise = 1.0;
    for (const auto r : robot_ids) {
        for (const auto p : poa_ids) {
            links.push_back(link(r, p, rng.uniform(50, 200), rng.uniform(0.0, 0.5), 0.0,
                                 rng.uniform() < 0.2 ? rng.uniform(0.0, 0.3) : 0.0));
            radio.sigma[{NodeId{r}, NodeId{p}}] = rng.uniform(0.0, 15.0);
        }
    }

    Instance inst;
    inst.graph = build_graph(std::move(nodes), std::move(links));
    inst.radio = std::move(radio);
    inst.idle_robot = NodeId{robot_ids.back()};
    std::uint32_t vf = 0;
    for (std::size_t i = 0; i < busy; ++i) {
        std::vector<double> computes(1 + rng.index(max_extra_vfs));
        for (auto& c : computes) c = rng.uniform(0.5, 2.0);
        auto s = chain_service(static_cast<std::uint32_t>(i), NodeId{robot_ids[i]}, vf, computes,
                               rng.uniform(1.0, 20.0), rng.uniform(5.0, 40.0));
        vf += static_cast<std::uint32_t>(s.vfs.size());
        inst.services.push_back(std::move(s));
    }
    return inst;
}

/// Bin-packing style instance: one robot hosting every driver VF, one PoA
/// and `servers` identical servers of capacity `capacity`, wired to the PoA.
/// Service i offloads one VF of compute items[i] over a zero-demand link and
/// has no deadline.
inline Instance ideal_instance(const std::vector<double>& items, double capacity, std::size_t servers) {
    std::vector<Node> nodes{robot_node(0, 0.0, 1.0), poa_node(1)};
    std::vector<Link> links{link(0, 1, 100.0)};
    for (std::size_t i = 0; i < servers; ++i) {
        const auto id = static_cast<std::uint32_t>(2 + i);
        nodes.push_back(server_node(id, Tier::Cloud, capacity, 1.0, 1.0));
        links.push_back(link(1, id, 100.0, 1.0));
    }
    Instance inst;
    inst.graph = build_graph(std::move(nodes), std::move(links));
    inst.radio.sigma[{NodeId{0}, NodeId{1}}] = 1.0;
    inst.idle_robot = NodeId{0};
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto sid = static_cast<std::uint32_t>(i);
        ServiceSpec s;
        s.id = ServiceId{sid};
        s.name = "ideal" + std::to_string(i);
        s.deadline = std::numeric_limits<double>::infinity();
        s.vfs = {{VfId{2 * sid}, "drv" + std::to_string(i), 0.0, NodeId{0}},
                 {VfId{2 * sid + 1}, "job" + std::to_string(i), items[i], std::nullopt}};
        s.vls = {{VfId{2 * sid}, VfId{2 * sid + 1}, 0.0}};
        inst.services.push_back(std::move(s));
    }
    return inst;
}

/// Every multiset of sizes drawn from `sizes` with 1..max_count elements,
/// in nondecreasing order.
inline std::vector<std::vector<double>> multisets(const std::vector<double>& sizes, std::size_t max_count) {
    std::vector<std::vector<double>> out;
    std::vector<double> cur;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        if (!cur.empty()) out.push_back(cur);
        if (cur.size() == max_count) return;
        for (std::size_t i = from; i < sizes.size(); ++i) {
            cur.push_back(sizes[i]);
            self(self, i);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

} // namespace vfo::test

#endif // VFO_TESTS_SUPPORT_HPP
