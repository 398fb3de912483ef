/**
 * @file baselines.hpp
 * @brief Two comparison placers, reconstructed from their failure modes.
 *
 * latency-agnostic: strongest-signal PoA, cheapest server with room,
 * bandwidth-only routing over raw link bandwidth, no deadline awareness.
 * radio-agnostic: the DLMD placer judging robot-PoA links by raw
 * (1 - drop) * bandwidth, so it may steer traffic over a link the radio
 * cannot carry.
 *
 * Neither validates its output; callers run check_embedding.
 */

#ifndef VFO_BASELINES_HPP
#define VFO_BASELINES_HPP

#include <vector>

#include "vfo/dlmd.hpp"

namespace vfo {

namespace detail {

inline NodeId strongest_poa(const HardwareGraph& g, NodeId robot, const RadioState& radio) {
    NodeId best{};
    double best_sigma = -1.0;
    for (const auto poa : g.poas_of(robot)) {
        const double s = radio.signal(robot, poa);
        if (s > best_sigma) {
            best_sigma = s;
            best = poa;
        }
    }
    return best;
}

inline void latency_agnostic_chain(const HardwareGraph& g, const ServiceSpec& s, NodeId robot,
                                   const RadioState& radio, const SolverOptions& opts, Residual& res,
                                   Embedding& e) {
    if (!e.attachment.count(robot)) e.attachment[robot] = strongest_poa(g, robot, radio);

    std::vector<NodeId> servers = g.nodes_of(NodeKind::Server);
    std::stable_sort(servers.begin(), servers.end(),
                     [&](NodeId x, NodeId y) { return g.node(x).cost < g.node(y).cost; });

    for (const auto& f : s.vfs) {
        if (f.pin) {
            e.placements[f.id] = *f.pin;
            res.compute[f.pin->value] -= f.compute;
            continue;
        }
        bool placed = false;
        for (const auto n : servers) {
            if (res.compute[n.value] + kTolerance < f.compute) continue;
            e.placements[f.id] = n;
            res.compute[n.value] -= f.compute;
            placed = true;
            break;
        }
        if (!placed) throw Error(Errc::NoFeasibleCapacity, "no server can host vf " + f.name);
    }

    for (const auto& l : s.vls) {
        RoutingCost c;
        c.graph = &g;
        c.radio = &radio;
        c.residual = &res;
        c.attachment = &e.attachment;
        c.view = CapacityView::Raw;
        c.demand = l.demand;
        c.alpha = opts.alpha;
        c.use_delay = false;
        const auto r = shortest_path(g, e.placements.at(l.from), e.placements.at(l.to), c);
        if (r.empty()) throw Error(Errc::NoFeasibleCapacity, "no path with enough bandwidth for a virtual link");
        commit_route(g, res, r, l.demand);
        e.routes[l.key()] = r;
    }
}

} // namespace detail

inline Embedding latency_agnostic_solve(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                        const RadioState& radio, const SolverOptions& opts = {}) {
    validate_services(g, services);
    Residual res(g);
    Embedding e;
    for (const auto& s : services) {
        detail::latency_agnostic_chain(g, s, detail::require_robot(g, s), radio, opts, res, e);
    }
    for (const auto robot : g.nodes_of(NodeKind::Robot)) {
        if (!e.attachment.count(robot)) e.attachment[robot] = detail::strongest_poa(g, robot, radio);
    }
    return e;
}

inline Embedding latency_agnostic_solve(const HardwareGraph& g, const ServiceSpec& s, NodeId robot,
                                        const RadioState& radio, const SolverOptions& opts = {}) {
    validate_services(g, {s});
    Residual res(g);
    Embedding e;
    detail::latency_agnostic_chain(g, s, robot, radio, opts, res, e);
    return e;
}

inline Embedding radio_agnostic_solve(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                      const RadioState& radio, const SolverOptions& opts = {}) {
    validate_services(g, services);
    const detail::PlacerPolicy policy{CapacityView::Raw, true};
    Residual res(g);
    Embedding e;
    for (const auto& s : services) {
        detail::place_chain(g, s, detail::require_robot(g, s), radio, opts, policy, res, e);
    }
    detail::attach_idle_robots(g, radio, opts, CapacityView::Raw, res, e);
    return e;
}

inline Embedding radio_agnostic_solve(const HardwareGraph& g, const ServiceSpec& s, NodeId robot,
                                      const RadioState& radio, const SolverOptions& opts = {}) {
    validate_services(g, {s});
    const detail::PlacerPolicy policy{CapacityView::Raw, true};
    Residual res(g);
    Embedding e;
    detail::place_chain(g, s, robot, radio, opts, policy, res, e);
    return e;
}

} // namespace vfo

#endif // VFO_BASELINES_HPP
