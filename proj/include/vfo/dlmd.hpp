/**
 * @file dlmd.hpp
 * @brief Greedy Cloud-first placement with radio-aware attachment.
 *
 * For one service bound to a robot:
 *   1. keep the PoAs whose free wireless capacity carries the first VL;
 *   2. attach the robot to the kept PoA minimising alpha / capacity + delay;
 *   3. for every unpinned VF in chain order, run Dijkstra from the host of
 *      the previous VF with link weight alpha / free_bandwidth + delay +
 *      queuing, score each server by tau = cost + path weight, and take the
 *      lowest-tau server that passes the incremental compute, bandwidth,
 *      stability, wireless and deadline checks.
 * The attachment is fixed before routing so that traffic only crosses the
 * robot-PoA link the robot is attached to.
 */

#ifndef VFO_DLMD_HPP
#define VFO_DLMD_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfo/feasibility.hpp"
#include "vfo/model.hpp"
#include "vfo/paths.hpp"

namespace vfo {

struct SolverOptions {
    double alpha = 1.0; // weight of the 1/lambda term in the routing metric

    bool operator==(const SolverOptions&) const = default;
};

/// How solvers judge a robot-PoA link: effective channel capacity, or the
/// raw (1 - drop) * bandwidth ignoring the radio.
enum class CapacityView { Effective, Raw };

/// Resources left once background load and earlier services are accounted for.
struct Residual {
    std::vector<double> compute;       // per node, CPU units
    std::vector<double> bandwidth;     // per link, Mbps
    std::vector<double> wireless_load; // per link, Mbps carried over robot-PoA links

    Residual() = default;
    explicit Residual(const HardwareGraph& g) : compute(g.size()), bandwidth(g.links().size()),
                                                wireless_load(g.links().size(), 0.0) {
        for (const auto& n : g.nodes()) compute[n.id.value] = n.compute;
        for (std::size_t i = 0; i < g.links().size(); ++i) bandwidth[i] = g.link(i).effective_bandwidth();
    }
};

inline double wireless_capacity(const HardwareGraph& g, const RadioState& radio, CapacityView view, std::size_t li) {
    const auto& l = g.link(li);
    if (view == CapacityView::Raw) return l.effective_bandwidth();
    const NodeId robot = g.node(l.a).kind == NodeKind::Robot ? l.a : l.b;
    return channel_capacity(l, radio.signal(robot, l.other(robot)), radio.noise);
}

namespace detail {

/// Free capacity of a link for new traffic; wireless links are further
/// capped by the (effective or raw) channel capacity.
inline double free_capacity(const HardwareGraph& g, const RadioState* radio, CapacityView view, const Residual* res,
                            std::size_t li) {
    const auto& l = g.link(li);
    double free = res ? res->bandwidth[li] : l.effective_bandwidth();
    if (l.wireless && radio) {
        const double wl = res ? res->wireless_load[li] : 0.0;
        free = std::min(free, wireless_capacity(g, *radio, view, li) - wl);
    }
    return free;
}

/// Channel capacity of a robot-PoA link left for new traffic. Unlike
/// free_capacity this ignores the link's wired bandwidth budget.
inline double free_channel(const HardwareGraph& g, const RadioState& radio, CapacityView view, const Residual* res,
                           std::size_t li) {
    return wireless_capacity(g, radio, view, li) - (res ? res->wireless_load[li] : 0.0);
}

} // namespace detail

/// Link weight alpha / free + delay + queuing over links able to carry
/// `demand`; robot-PoA links other than the robot's attachment are unusable.
struct RoutingCost {
    const HardwareGraph* graph = nullptr;
    const RadioState* radio = nullptr;
    const Residual* residual = nullptr;
    const std::map<NodeId, NodeId>* attachment = nullptr;
    CapacityView view = CapacityView::Effective;
    double demand = 0.0;
    double alpha = 1.0;
    bool use_delay = true;

    std::optional<double> operator()(const Link& l, std::size_t li) const {
        if (l.wireless && attachment) {
            const NodeId robot = graph->node(l.a).kind == NodeKind::Robot ? l.a : l.b;
            const auto it = attachment->find(robot);
            if (it == attachment->end() || it->second != l.other(robot)) return std::nullopt;
        }
        const double free = detail::free_capacity(*graph, radio, view, residual, li);
        if (!(free > 0.0) || free + kTolerance < demand) return std::nullopt;
        return alpha / free + (use_delay ? hop_delay(l) : 0.0);
    }
};

inline RoutingCost default_routing_cost(const HardwareGraph& g, const SolverOptions& opts = {}) {
    RoutingCost c;
    c.graph = &g;
    c.alpha = opts.alpha;
    return c;
}

struct TauCandidate {
    NodeId node;
    double tau = 0.0;
    Route path; // anchor ... node

    bool operator==(const TauCandidate&) const = default;
};

/// Scores every reachable candidate with compute capacity by
/// tau = cost + shortest-path weight from the anchor. Ascending by (tau, id).
template <class CostFn>
std::vector<TauCandidate> tau_candidates(const HardwareGraph& g, NodeId anchor, const std::vector<NodeId>& candidates,
                                         CostFn&& cost) {
    const ShortestPathTree tree(g, anchor, cost);
    std::vector<TauCandidate> out;
    for (const auto n : candidates) {
        const auto& node = g.node(n);
        if (!(node.compute > 0.0)) continue;
        if (n == anchor) {
            out.push_back({n, node.cost, {n}});
            continue;
        }
        if (!tree.reachable(n)) continue;
        out.push_back({n, node.cost + tree.distance(n), tree.path_to(n)});
    }
    std::sort(out.begin(), out.end(), [](const TauCandidate& x, const TauCandidate& y) {
        return x.tau < y.tau || (x.tau == y.tau && x.node < y.node);
    });
    return out;
}

inline std::vector<TauCandidate> tau_candidates(const HardwareGraph& g, NodeId anchor,
                                                const std::vector<NodeId>& candidates,
                                                const SolverOptions& opts = {}) {
    return tau_candidates(g, anchor, candidates, default_routing_cost(g, opts));
}

/// PoAs whose free channel capacity towards `robot` is at least `demand`.
/// Throws NoCoverage when none qualifies.
inline std::vector<NodeId> prune_poas(const HardwareGraph& g, NodeId robot, double demand, const RadioState& radio,
                                      CapacityView view = CapacityView::Effective, const Residual* residual = nullptr) {
    std::vector<NodeId> out;
    for (const auto poa : g.poas_of(robot)) {
        const auto li = *g.find_link(robot, poa);
        if (detail::free_channel(g, radio, view, residual, li) + kTolerance >= demand) out.push_back(poa);
    }
    if (out.empty()) throw Error(Errc::NoCoverage, "no PoA can carry " + std::to_string(demand) + " Mbps");
    return out;
}

/// The pruned PoA minimising alpha / free channel capacity + delay; ties by id.
inline NodeId select_poa(const HardwareGraph& g, NodeId robot, const std::vector<NodeId>& pruned,
                         const RadioState& radio, const SolverOptions& opts = {},
                         CapacityView view = CapacityView::Effective, const Residual* residual = nullptr) {
    if (pruned.empty()) throw Error(Errc::NoCoverage, "no PoA to select from");
    std::vector<NodeId> sorted = pruned;
    std::sort(sorted.begin(), sorted.end());
    NodeId best = sorted.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto poa : sorted) {
        const auto li = g.find_link(robot, poa);
        if (!li) throw Error(Errc::NotWireless, "PoA not linked to robot");
        const double free = detail::free_channel(g, radio, view, residual, *li);
        const double score = free > 0.0 ? opts.alpha / free + g.link(*li).delay
                                        : std::numeric_limits<double>::infinity();
        if (score < best_score) {
            best_score = score;
            best = poa;
        }
    }
    return best;
}

namespace detail {

struct PlacerPolicy {
    CapacityView view = CapacityView::Effective;
    bool fallback_to_all_poas = false; // attach even when no PoA passes pruning
};

/// Demand of the service's first VL: between the first two VFs in chain
/// order when present, otherwise the first VL leaving the first VF.
inline double first_vl_demand(const ServiceSpec& s) {
    if (s.vfs.empty()) return 0.0;
    const VfId head = s.vfs.front().id;
    if (s.vfs.size() > 1) {
        for (const auto& l : s.vls) {
            if (l.from == head && l.to == s.vfs[1].id) return l.demand;
        }
    }
    for (const auto& l : s.vls) {
        if (l.from == head) return l.demand;
    }
    return 0.0;
}

inline void commit_route(const HardwareGraph& g, Residual& res, const Route& r, double demand) {
    for (std::size_t i = 1; i < r.size(); ++i) {
        const auto li = *g.find_link(r[i - 1], r[i]);
        res.bandwidth[li] -= demand;
        if (g.link(li).wireless) res.wireless_load[li] += demand;
    }
}

inline double route_delay(const HardwareGraph& g, const Route& r) {
    double d = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) d += hop_delay(g.link(*g.find_link(r[i - 1], r[i])));
    return d;
}

/// Attach `robot` (or keep its existing attachment) for a service whose
/// first VL needs `demand`.
inline NodeId attach_robot(const HardwareGraph& g, NodeId robot, double demand, const RadioState& radio,
                           const SolverOptions& opts, const PlacerPolicy& policy, const Residual& res,
                           Embedding& e) {
    std::vector<NodeId> pruned;
    try {
        pruned = prune_poas(g, robot, demand, radio, policy.view, &res);
    } catch (const Error& err) {
        if (err.code() != Errc::NoCoverage || !policy.fallback_to_all_poas) throw;
        pruned = g.poas_of(robot);
    }
    if (const auto it = e.attachment.find(robot); it != e.attachment.end()) {
        if (std::find(pruned.begin(), pruned.end(), it->second) == pruned.end() && !policy.fallback_to_all_poas) {
            throw Error(Errc::NoFeasiblePlacement, "current attachment cannot carry another service");
        }
        return it->second;
    }
    const NodeId poa = select_poa(g, robot, pruned, radio, opts, policy.view, &res);
    e.attachment[robot] = poa;
    return poa;
}

/// Places one service on top of `e`, consuming `res`. Leaves `e` and `res`
/// untouched when it throws.
inline void place_chain(const HardwareGraph& g, const ServiceSpec& s, NodeId robot, const RadioState& radio,
                        const SolverOptions& opts, const PlacerPolicy& policy, Residual& res, Embedding& e) {
    Residual work = res;
    Embedding out = e;
    attach_robot(g, robot, first_vl_demand(s), radio, opts, policy, work, out);

    double net_delay = 0.0;
    double pro_delay = 0.0;

    auto cost_for = [&](double demand) {
        RoutingCost c;
        c.graph = &g;
        c.radio = &radio;
        c.residual = &work;
        c.attachment = &out.attachment;
        c.view = policy.view;
        c.demand = demand;
        c.alpha = opts.alpha;
        return c;
    };

    auto processing_at = [&](const VirtualFunction& f, NodeId host) -> std::optional<double> {
        const double rate = service_rate(g, f, host);
        double d = 0.0;
        for (const auto& l : s.vls) {
            if (l.to != f.id) continue;
            if (!(rate - l.demand > 0.0)) return std::nullopt;
            d += 1.0 / (rate - l.demand);
        }
        return d;
    };

    // Routes for every VL between `f` (tentatively at `host`) and an already
    // placed VF. `given` supplies a ready path for one of them.
    struct Pending {
        VlKey key;
        Route route;
        double demand;
    };
    auto route_incident = [&](const VirtualFunction& f, NodeId host, const std::optional<VlKey>& given_key,
                              const Route& given) -> std::optional<std::vector<Pending>> {
        std::vector<Pending> pending;
        std::map<std::size_t, double> added;
        for (const auto& l : s.vls) {
            if (l.from != f.id && l.to != f.id) continue;
            const VfId other = l.from == f.id ? l.to : l.from;
            const auto placed = out.placements.find(other);
            if (placed == out.placements.end() || out.routes.count(l.key())) continue;
            const NodeId src = l.from == f.id ? host : placed->second;
            const NodeId dst = l.to == f.id ? host : placed->second;
            Route r;
            if (given_key && *given_key == l.key()) {
                r = given;
                if (r.front() != src) std::reverse(r.begin(), r.end());
            } else {
                r = shortest_path(g, src, dst, cost_for(l.demand));
                if (r.empty()) return std::nullopt;
            }
            for (std::size_t i = 1; i < r.size(); ++i) added[*g.find_link(r[i - 1], r[i])] += l.demand;
            pending.push_back({l.key(), std::move(r), l.demand});
        }
        for (const auto& [li, load] : added) {
            if (load > detail::free_capacity(g, &radio, policy.view, &work, li) + kTolerance) return std::nullopt;
        }
        return pending;
    };

    auto commit = [&](const VirtualFunction& f, NodeId host, const std::vector<Pending>& pending, double pro) {
        out.placements[f.id] = host;
        work.compute[host.value] -= f.compute;
        for (const auto& p : pending) {
            commit_route(g, work, p.route, p.demand);
            net_delay += route_delay(g, p.route);
            out.routes[p.key] = p.route;
        }
        pro_delay += pro;
    };

    auto fail = [&](const VirtualFunction& f, const std::string& why) {
        return Error(Errc::NoFeasiblePlacement, "service " + s.name + ", vf " + f.name + ": " + why);
    };

    for (const auto& f : s.vfs) {
        if (!f.pin) continue;
        if (work.compute[f.pin->value] + kTolerance < f.compute) throw fail(f, "pinned node lacks compute");
        const auto pro = processing_at(f, *f.pin);
        if (!pro) throw fail(f, "pinned node is unstable");
        const auto pending = route_incident(f, *f.pin, std::nullopt, {});
        if (!pending) throw fail(f, "no route towards pinned node");
        commit(f, *f.pin, *pending, *pro);
    }

    const auto servers = g.nodes_of(NodeKind::Server);
    for (std::size_t i = 0; i < s.vfs.size(); ++i) {
        const auto& f = s.vfs[i];
        if (f.pin) continue;
        const NodeId anchor = i == 0 ? robot : out.placements.at(s.vfs[i - 1].id);
        std::optional<VlKey> anchor_key;
        double anchor_demand = 0.0;
        if (i > 0) {
            for (const auto& l : s.vls) {
                if ((l.from == s.vfs[i - 1].id && l.to == f.id) || (l.to == s.vfs[i - 1].id && l.from == f.id)) {
                    anchor_key = l.key();
                    anchor_demand = l.demand;
                    break;
                }
            }
        }
        bool placed = false;
        for (const auto& cand : tau_candidates(g, anchor, servers, cost_for(anchor_demand))) {
            if (work.compute[cand.node.value] + kTolerance < f.compute) continue;
            const auto pro = processing_at(f, cand.node);
            if (!pro) continue;
            const auto pending = route_incident(f, cand.node, anchor_key, cand.path);
            if (!pending) continue;
            double extra = 0.0;
            for (const auto& p : *pending) extra += route_delay(g, p.route);
            if (net_delay + extra + pro_delay + *pro > s.deadline + kTolerance) continue;
            commit(f, cand.node, *pending, *pro);
            placed = true;
            break;
        }
        if (!placed) throw fail(f, "every candidate violates a constraint");
    }

    res = std::move(work);
    e = std::move(out);
}

inline void require_feasible(const HardwareGraph& g, const std::vector<ServiceSpec>& services, const Embedding& e,
                             const RadioState& radio) {
    const auto v = check_embedding(g, services, e, radio);
    if (!v.empty()) {
        throw Error(Errc::Infeasible, std::string(to_string(v.front().kind)) + " at " + to_string(v.front().location));
    }
}

inline NodeId require_robot(const HardwareGraph& g, const ServiceSpec& s) {
    const auto r = robot_of(s, g);
    if (!r) throw Error(Errc::InvalidService, "service " + s.name + " has no VF pinned on a robot");
    return *r;
}

/// Attach robots that carry no service so every robot has one PoA.
inline void attach_idle_robots(const HardwareGraph& g, const RadioState& radio, const SolverOptions& opts,
                               CapacityView view, const Residual& res, Embedding& e) {
    for (const auto robot : g.nodes_of(NodeKind::Robot)) {
        if (e.attachment.count(robot)) continue;
        e.attachment[robot] = select_poa(g, robot, g.poas_of(robot), radio, opts, view, &res);
    }
}

} // namespace detail

/// Places a single service bound to `robot` on an otherwise empty substrate.
inline Embedding place_service(const HardwareGraph& g, const ServiceSpec& s, NodeId robot, const RadioState& radio,
                               const SolverOptions& opts = {}) {
    validate_services(g, {s});
    if (g.node(robot).kind != NodeKind::Robot) throw Error(Errc::InvalidService, "anchor is not a robot");
    Residual res(g);
    Embedding e;
    detail::place_chain(g, s, robot, radio, opts, {}, res, e);
    const std::vector<ServiceSpec> one{s};
    // Only this service's robot is judged; other robots are not its concern.
    auto v = check_embedding(g, one, e, radio);
    std::erase_if(v, [&](const Violation& x) {
        return x.kind == ViolationKind::Attachment && x.location != Location::node(robot);
    });
    if (!v.empty()) {
        throw Error(Errc::Infeasible, std::string(to_string(v.front().kind)) + " at " + to_string(v.front().location));
    }
    return e;
}

/// Places services one after the other, each on the resources the previous
/// ones left. Robots without a service are attached as well.
inline Embedding place_services(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                const RadioState& radio, const SolverOptions& opts = {}) {
    validate_services(g, services);
    Residual res(g);
    Embedding e;
    for (const auto& s : services) {
        detail::place_chain(g, s, detail::require_robot(g, s), radio, opts, {}, res, e);
    }
    detail::attach_idle_robots(g, radio, opts, CapacityView::Effective, res, e);
    detail::require_feasible(g, services, e, radio);
    return e;
}

} // namespace vfo

#endif // VFO_DLMD_HPP
