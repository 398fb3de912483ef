/**
 * @file model.hpp
 * @brief Substrate graph, service graphs, radio state and embeddings.
 *
 * All types are plain values. A HardwareGraph is only obtainable through
 * build_graph(), which validates it; afterwards it is immutable.
 */

#ifndef VFO_MODEL_HPP
#define VFO_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vfo/error.hpp"

namespace vfo {

template <class Tag>
struct Id {
    std::uint32_t value = 0;

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}

    constexpr auto operator<=>(const Id&) const = default;
};

using NodeId = Id<struct NodeTag>;
using VfId = Id<struct VfTag>;
using ServiceId = Id<struct ServiceTag>;

enum class NodeKind { Robot, PoA, Switch, Server };
enum class Tier { NearEdge, FarEdge, Cloud };

constexpr std::string_view to_string(NodeKind k) noexcept {
    switch (k) {
    case NodeKind::Robot: return "robot";
    case NodeKind::PoA: return "poa";
    case NodeKind::Switch: return "switch";
    case NodeKind::Server: return "server";
    }
    return "?";
}

constexpr std::string_view to_string(Tier t) noexcept {
    switch (t) {
    case Tier::NearEdge: return "near_edge";
    case Tier::FarEdge: return "far_edge";
    case Tier::Cloud: return "cloud";
    }
    return "?";
}

constexpr bool is_edge(Tier t) noexcept { return t != Tier::Cloud; }

/// Rank by proximity to the robot: NearEdge 0, FarEdge 1, Cloud 2.
constexpr int distance_rank(Tier t) noexcept { return static_cast<int>(t); }

/// Server cost per tier. Costs must not decrease towards the Edge.
struct CostTable {
    double cloud = 1.0;
    double far_edge = 2.0;
    double near_edge = 4.0;

    [[nodiscard]] constexpr double operator()(Tier t) const noexcept {
        switch (t) {
        case Tier::NearEdge: return near_edge;
        case Tier::FarEdge: return far_edge;
        case Tier::Cloud: return cloud;
        }
        return 0.0;
    }

    bool operator==(const CostTable&) const = default;
};

struct Position {
    double x = 0.0; // m
    double y = 0.0; // m

    bool operator==(const Position&) const = default;
};

inline double distance(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

struct Node {
    NodeId id;
    std::string name;
    NodeKind kind = NodeKind::Switch;
    std::optional<Tier> tier;       // servers only
    double compute = 0.0;           // CPU units
    double cost = 0.0;              // kappa, dimensionless
    double rate = 0.0;              // processing rate mu, requests/ms
    std::optional<Position> position;

    bool operator==(const Node&) const = default;
};

struct Link {
    NodeId a;
    NodeId b;
    double bandwidth = 0.0; // Mbps
    double delay = 0.0;     // ms
    double queuing = 0.0;   // ms
    double drop = 0.0;      // fraction in [0, 1]
    bool wireless = false;  // set by build_graph: true iff Robot-PoA

    [[nodiscard]] NodeId other(NodeId n) const noexcept { return n == a ? b : a; }
    [[nodiscard]] bool joins(NodeId x, NodeId y) const noexcept {
        return (a == x && b == y) || (a == y && b == x);
    }
    /// Usable bandwidth once packet drop is accounted for.
    [[nodiscard]] double effective_bandwidth() const noexcept { return (1.0 - drop) * bandwidth; }

    bool operator==(const Link&) const = default;
};

struct Adjacent {
    NodeId neighbor;
    std::size_t link = 0;
};

class HardwareGraph;
HardwareGraph build_graph(std::vector<Node> nodes, std::vector<Link> links);

/// The substrate: typed nodes and undirected links with symmetric attributes.
class HardwareGraph {
public:
    HardwareGraph() = default;

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Link>& links() const noexcept { return links_; }

    [[nodiscard]] bool contains(NodeId id) const noexcept { return id.value < nodes_.size(); }

    [[nodiscard]] const Node& node(NodeId id) const {
        if (!contains(id)) {
            throw Error(Errc::DanglingEndpoint, "unknown node " + std::to_string(id.value));
        }
        return nodes_[id.value];
    }

    [[nodiscard]] const Link& link(std::size_t index) const { return links_.at(index); }

    [[nodiscard]] std::optional<std::size_t> find_link(NodeId x, NodeId y) const {
        const auto it = link_index_.find(key(x, y));
        if (it == link_index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] const std::vector<Adjacent>& neighbors(NodeId id) const {
        return adjacency_.at(id.value);
    }

    [[nodiscard]] std::vector<NodeId> nodes_of(NodeKind kind) const {
        std::vector<NodeId> out;
        for (const auto& n : nodes_) {
            if (n.kind == kind) out.push_back(n.id);
        }
        return out;
    }

    /// PoAs sharing a wireless link with the robot, ascending by id.
    [[nodiscard]] std::vector<NodeId> poas_of(NodeId robot) const {
        std::vector<NodeId> out;
        for (const auto& adj : neighbors(robot)) {
            if (links_[adj.link].wireless) out.push_back(adj.neighbor);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Copy with a uniform fraction of every link's bandwidth and every
    /// server's compute held by background load.
    [[nodiscard]] HardwareGraph with_stress(double fraction) const {
        if (!(fraction >= 0.0 && fraction <= 1.0)) {
            throw Error(Errc::DomainError, "stress fraction must lie in [0,1]");
        }
        HardwareGraph g = *this;
        for (auto& l : g.links_) l.bandwidth *= (1.0 - fraction);
        for (auto& n : g.nodes_) {
            if (n.kind == NodeKind::Server) n.compute *= (1.0 - fraction);
        }
        return g;
    }

    bool operator==(const HardwareGraph& o) const { return nodes_ == o.nodes_ && links_ == o.links_; }

private:
    friend HardwareGraph build_graph(std::vector<Node> nodes, std::vector<Link> links);

    static std::pair<std::uint32_t, std::uint32_t> key(NodeId x, NodeId y) noexcept {
        return std::minmax(x.value, y.value);
    }

    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::vector<std::vector<Adjacent>> adjacency_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> link_index_;
};

/// Validates and indexes a substrate. Node ids must be unique and dense
/// (0..n-1 in any order); links are stored in the given order.
inline HardwareGraph build_graph(std::vector<Node> nodes, std::vector<Link> links) {
    HardwareGraph g;
    std::sort(nodes.begin(), nodes.end(), [](const Node& x, const Node& y) { return x.id < y.id; });
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0 && nodes[i].id == nodes[i - 1].id) {
            throw Error(Errc::DuplicateId, "node id " + std::to_string(nodes[i].id.value));
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id.value != i) {
            throw Error(Errc::InvalidAttribute, "node ids must be dense, missing " + std::to_string(i));
        }
    }

    for (const auto& n : nodes) {
        const auto where = "node " + std::to_string(n.id.value);
        if (n.compute < 0.0 || n.cost < 0.0 || n.rate < 0.0) {
            throw Error(Errc::InvalidAttribute, where + ": negative compute, cost or rate");
        }
        if ((n.kind == NodeKind::Switch || n.kind == NodeKind::PoA) && n.compute != 0.0) {
            throw Error(Errc::InvalidAttribute, where + ": switches and PoAs host no VFs");
        }
        if (n.kind == NodeKind::Server && !n.tier) {
            throw Error(Errc::InvalidAttribute, where + ": server without tier");
        }
        if (n.kind != NodeKind::Server && n.tier) {
            throw Error(Errc::InvalidAttribute, where + ": only servers carry a tier");
        }
        if ((n.kind == NodeKind::Server || n.kind == NodeKind::Robot) && !(n.rate > 0.0)) {
            throw Error(Errc::InvalidAttribute, where + ": processing rate must be positive");
        }
    }
    for (const auto& x : nodes) {
        for (const auto& y : nodes) {
            if (x.kind == NodeKind::Server && y.kind == NodeKind::Server &&
                distance_rank(*x.tier) < distance_rank(*y.tier) && x.cost < y.cost) {
                throw Error(Errc::InvalidAttribute, "server costs must not decrease towards the Edge");
            }
        }
    }

    g.adjacency_.resize(nodes.size());
    for (std::size_t i = 0; i < links.size(); ++i) {
        auto& l = links[i];
        if (l.a.value >= nodes.size() || l.b.value >= nodes.size()) {
            throw Error(Errc::DanglingEndpoint, "link " + std::to_string(i) + " references unknown node");
        }
        if (l.a == l.b) {
            throw Error(Errc::InvalidAttribute, "link " + std::to_string(i) + " is a self loop");
        }
        if (!(l.bandwidth > 0.0) || l.delay < 0.0 || l.queuing < 0.0 || l.drop < 0.0 || l.drop > 1.0) {
            throw Error(Errc::InvalidAttribute, "link " + std::to_string(i) + " attribute out of range");
        }
        const auto ka = nodes[l.a.value].kind;
        const auto kb = nodes[l.b.value].kind;
        const bool robot_end = ka == NodeKind::Robot || kb == NodeKind::Robot;
        l.wireless = (ka == NodeKind::Robot && kb == NodeKind::PoA) || (ka == NodeKind::PoA && kb == NodeKind::Robot);
        if (robot_end && !l.wireless) {
            throw Error(Errc::InvalidAttribute, "robots only link wirelessly to PoAs");
        }
        const auto k = HardwareGraph::key(l.a, l.b);
        if (!g.link_index_.emplace(k, i).second) {
            throw Error(Errc::DuplicateId, "second link between " + std::to_string(k.first) + " and " +
                                               std::to_string(k.second));
        }
        g.adjacency_[l.a.value].push_back({l.b, i});
        g.adjacency_[l.b.value].push_back({l.a, i});
    }

    // The non-robot core must be connected; every robot needs a PoA.
    std::vector<std::size_t> core;
    for (const auto& n : nodes) {
        if (n.kind == NodeKind::Robot) {
            const bool has_poa = std::any_of(g.adjacency_[n.id.value].begin(), g.adjacency_[n.id.value].end(),
                                             [&](const Adjacent& a) { return links[a.link].wireless; });
            if (!has_poa) {
                throw Error(Errc::DisconnectedCore, "robot " + n.name + " has no wireless link");
            }
        } else {
            core.push_back(n.id.value);
        }
    }
    if (!core.empty()) {
        std::vector<bool> seen(nodes.size(), false);
        std::queue<std::size_t> frontier;
        frontier.push(core.front());
        seen[core.front()] = true;
        std::size_t reached = 1;
        while (!frontier.empty()) {
            const auto u = frontier.front();
            frontier.pop();
            for (const auto& adj : g.adjacency_[u]) {
                const auto v = adj.neighbor.value;
                if (seen[v] || nodes[v].kind == NodeKind::Robot) continue;
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
        }
        if (reached != core.size()) {
            throw Error(Errc::DisconnectedCore, "non-robot nodes are not connected");
        }
    }

    g.nodes_ = std::move(nodes);
    g.links_ = std::move(links);
    return g;
}

struct VirtualFunction {
    VfId id;
    std::string name;
    double compute = 0.0;       // CPU units
    std::optional<NodeId> pin;  // must be placed exactly here when set

    bool operator==(const VirtualFunction&) const = default;
};

struct VlKey {
    VfId from;
    VfId to;

    auto operator<=>(const VlKey&) const = default;
};

struct VirtualLink {
    VfId from;
    VfId to;
    double demand = 0.0; // Mbps

    [[nodiscard]] VlKey key() const noexcept { return {from, to}; }
    bool operator==(const VirtualLink&) const = default;
};

/// A robotic service; the VF order is the chain order.
struct ServiceSpec {
    ServiceId id;
    std::string name;
    std::vector<VirtualFunction> vfs;
    std::vector<VirtualLink> vls;
    double deadline = 0.0; // ms

    [[nodiscard]] const VirtualFunction* find_vf(VfId v) const {
        for (const auto& f : vfs) {
            if (f.id == v) return &f;
        }
        return nullptr;
    }

    bool operator==(const ServiceSpec&) const = default;
};

/// The robot a service is bound to: the first VF pinned on a robot.
inline std::optional<NodeId> robot_of(const ServiceSpec& s, const HardwareGraph& g) {
    for (const auto& f : s.vfs) {
        if (f.pin && g.contains(*f.pin) && g.node(*f.pin).kind == NodeKind::Robot) return f.pin;
    }
    return std::nullopt;
}

inline void validate_services(const HardwareGraph& g, const std::vector<ServiceSpec>& services) {
    std::set<ServiceId> sids;
    std::set<VfId> vids;
    for (const auto& s : services) {
        const auto where = "service " + std::to_string(s.id.value);
        if (!sids.insert(s.id).second) throw Error(Errc::DuplicateId, where);
        if (!(s.deadline >= 0.0)) throw Error(Errc::InvalidService, where + ": negative deadline");
        for (const auto& f : s.vfs) {
            if (!vids.insert(f.id).second) {
                throw Error(Errc::DuplicateId, "vf " + std::to_string(f.id.value));
            }
            if (f.compute < 0.0) throw Error(Errc::InvalidService, where + ": negative compute");
            if (f.pin && !g.contains(*f.pin)) {
                throw Error(Errc::DanglingEndpoint, where + ": pin on unknown node");
            }
        }
        std::set<VlKey> keys;
        for (const auto& l : s.vls) {
            if (!s.find_vf(l.from) || !s.find_vf(l.to)) {
                throw Error(Errc::InvalidService, where + ": virtual link references undeclared VF");
            }
            if (l.from == l.to) throw Error(Errc::InvalidService, where + ": virtual link loops");
            if (l.demand < 0.0) throw Error(Errc::InvalidService, where + ": negative demand");
            if (!keys.insert(l.key()).second) throw Error(Errc::DuplicateId, where + ": repeated virtual link");
        }
    }
}

/// Signal strength per (robot, PoA) plus noise, all in linear power units.
struct RadioState {
    double noise = 1.0;
    std::map<std::pair<NodeId, NodeId>, double> sigma;

    [[nodiscard]] double signal(NodeId robot, NodeId poa) const {
        const auto it = sigma.find({robot, poa});
        return it == sigma.end() ? 0.0 : it->second;
    }

    bool operator==(const RadioState&) const = default;
};

using Route = std::vector<NodeId>;

/// A full decision. A route is a node path from the source VF's host to the
/// destination VF's host; an intra-node VL has the one-node route [host].
struct Embedding {
    std::map<VfId, NodeId> placements;
    std::map<VfId, std::vector<NodeId>> replicas; // extra copies; solvers never emit these
    std::map<VlKey, Route> routes;
    std::map<NodeId, NodeId> attachment; // robot -> PoA

    bool operator==(const Embedding&) const = default;
};

inline std::set<VfId> hosted_vfs(const Embedding& e, NodeId n) {
    std::set<VfId> out;
    for (const auto& [vf, host] : e.placements) {
        if (host == n) out.insert(vf);
    }
    for (const auto& [vf, hosts] : e.replicas) {
        if (std::find(hosts.begin(), hosts.end(), n) != hosts.end()) out.insert(vf);
    }
    return out;
}

/// VLs whose route traverses the link {x, y} in either direction.
inline std::set<VlKey> hosted_vls(const Embedding& e, NodeId x, NodeId y) {
    std::set<VlKey> out;
    for (const auto& [key, route] : e.routes) {
        for (std::size_t i = 1; i < route.size(); ++i) {
            if ((route[i - 1] == x && route[i] == y) || (route[i - 1] == y && route[i] == x)) {
                out.insert(key);
                break;
            }
        }
    }
    return out;
}

} // namespace vfo

template <class Tag>
struct std::hash<vfo::Id<Tag>> {
    std::size_t operator()(const vfo::Id<Tag>& id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

#endif // VFO_MODEL_HPP
