/**
 * @file feasibility.hpp
 * @brief Constraint evaluation, delay model and Edge-cost objective.
 *
 * Every check is a pure function of (graph, services, embedding, radio) and
 * returns its violations; check_embedding() concatenates all of them in a
 * deterministic order. Violations are data, never exceptions.
 */

#ifndef VFO_FEASIBILITY_HPP
#define VFO_FEASIBILITY_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vfo/model.hpp"

namespace vfo {

/// Absolute slack applied to every `measured <= bound` comparison.
inline constexpr double kTolerance = 1e-9;

enum class ViolationKind {
    Compute,
    VfUnplaced,
    Bandwidth,
    VlUnrouted,
    Flow,
    SteerToVf,
    Deadline,
    SteerIfAttached,
    Attachment,
    WirelessCapacity,
    Stability,
};

constexpr std::string_view to_string(ViolationKind k) noexcept {
    switch (k) {
    case ViolationKind::Compute: return "Compute";
    case ViolationKind::VfUnplaced: return "VfUnplaced";
    case ViolationKind::Bandwidth: return "Bandwidth";
    case ViolationKind::VlUnrouted: return "VlUnrouted";
    case ViolationKind::Flow: return "Flow";
    case ViolationKind::SteerToVf: return "SteerToVf";
    case ViolationKind::Deadline: return "Deadline";
    case ViolationKind::SteerIfAttached: return "SteerIfAttached";
    case ViolationKind::Attachment: return "Attachment";
    case ViolationKind::WirelessCapacity: return "WirelessCapacity";
    case ViolationKind::Stability: return "Stability";
    }
    return "?";
}

struct Location {
    enum class Type { Node, Link, Service, Vf, Vl };
    Type type = Type::Node;
    std::uint32_t a = 0;
    std::uint32_t b = 0;

    static Location node(NodeId n) { return {Type::Node, n.value, 0}; }
    static Location link(NodeId x, NodeId y) {
        const auto [lo, hi] = std::minmax(x.value, y.value);
        return {Type::Link, lo, hi};
    }
    static Location service(ServiceId s) { return {Type::Service, s.value, 0}; }
    static Location vf(VfId v) { return {Type::Vf, v.value, 0}; }
    static Location vl(VlKey k) { return {Type::Vl, k.from.value, k.to.value}; }

    auto operator<=>(const Location&) const = default;
};

inline std::string to_string(const Location& l) {
    switch (l.type) {
    case Location::Type::Node: return "node:" + std::to_string(l.a);
    case Location::Type::Link: return "link:" + std::to_string(l.a) + "-" + std::to_string(l.b);
    case Location::Type::Service: return "service:" + std::to_string(l.a);
    case Location::Type::Vf: return "vf:" + std::to_string(l.a);
    case Location::Type::Vl: return "vl:" + std::to_string(l.a) + ">" + std::to_string(l.b);
    }
    return "?";
}

struct Violation {
    ViolationKind kind = ViolationKind::Compute;
    Location location;
    double measured = 0.0;
    double bound = 0.0;

    bool operator==(const Violation&) const = default;
};

inline bool violation_order(const Violation& x, const Violation& y) {
    return std::tie(x.kind, x.location) < std::tie(y.kind, y.location);
}

// ---------------------------------------------------------------------------
// Closed-form pieces

/// Effective wireless capacity (1 - drop) * bandwidth * log2(1 + sigma / noise), in Mbps.
inline double channel_capacity(const Link& link, double sigma, double noise) {
    if (!link.wireless) throw Error(Errc::NotWireless, "capacity is defined for robot-PoA links only");
    if (!(noise > 0.0) || sigma < 0.0) throw Error(Errc::DomainError, "noise must be > 0 and sigma >= 0");
    return link.effective_bandwidth() * std::log2(1.0 + sigma / noise);
}

inline double channel_capacity(const HardwareGraph& g, const RadioState& radio, NodeId robot, NodeId poa) {
    const auto li = g.find_link(robot, poa);
    if (!li) throw Error(Errc::NotWireless, "robot and PoA are not linked");
    return channel_capacity(g.link(*li), radio.signal(robot, poa), radio.noise);
}

/// Aggregate service rate C(v) * mu of the node hosting `vf`.
inline double service_rate(const HardwareGraph& g, const VirtualFunction& vf, NodeId host) {
    return vf.compute * g.node(host).rate;
}

/// Mean M/G/1-PS delay of `vf`: sum over its incoming VLs of 1 / (C(v) mu - lambda).
/// Throws Unstable when some incoming VL saturates the server.
inline double processing_delay(const HardwareGraph& g, const ServiceSpec& s, VfId vf, const Embedding& e) {
    const auto* f = s.find_vf(vf);
    if (!f) throw Error(Errc::InvalidEmbedding, "vf not in service");
    const auto it = e.placements.find(vf);
    if (it == e.placements.end()) throw Error(Errc::InvalidEmbedding, "vf " + f->name + " is not placed");
    const double rate = service_rate(g, *f, it->second);
    double total = 0.0;
    for (const auto& l : s.vls) {
        if (l.to != vf) continue;
        const double headroom = rate - l.demand;
        if (!(headroom > 0.0)) throw Error(Errc::Unstable, "vf " + f->name + " cannot sustain its input");
        total += 1.0 / headroom;
    }
    return total;
}

inline double hop_delay(const Link& l) { return l.delay + l.queuing; }

/// Sum over VLs and traversed links of delay + queuing.
inline double network_delay(const HardwareGraph& g, const ServiceSpec& s, const Embedding& e) {
    double total = 0.0;
    for (const auto& l : s.vls) {
        const auto it = e.routes.find(l.key());
        if (it == e.routes.end() || it->second.empty()) {
            throw Error(Errc::UnroutedVl, "virtual link " + std::to_string(l.from.value) + ">" +
                                              std::to_string(l.to.value) + " has no route");
        }
        const auto& r = it->second;
        for (std::size_t i = 1; i < r.size(); ++i) {
            const auto li = g.find_link(r[i - 1], r[i]);
            if (!li) throw Error(Errc::InvalidEmbedding, "route hop is not a link");
            total += hop_delay(g.link(*li));
        }
    }
    return total;
}

struct DelayReport {
    ServiceId service;
    double network = 0.0;               // ms
    std::map<VfId, double> processing;  // ms, stable placed VFs only
    double total = 0.0;                 // network + sum of processing
    double deadline = 0.0;              // ms
    double wireless = 0.0;              // ms share of `network` spent on robot-PoA hops

    [[nodiscard]] double processing_total() const {
        double t = 0.0;
        for (const auto& [_, d] : processing) t += d;
        return t;
    }
};

/// Tolerant delay evaluation: unrouted VLs, non-link hops, unplaced and
/// unstable VFs contribute nothing (they are reported as violations).
inline DelayReport delay_report(const HardwareGraph& g, const ServiceSpec& s, const Embedding& e) {
    DelayReport rep;
    rep.service = s.id;
    rep.deadline = s.deadline;
    for (const auto& l : s.vls) {
        const auto it = e.routes.find(l.key());
        if (it == e.routes.end()) continue;
        const auto& r = it->second;
        for (std::size_t i = 1; i < r.size(); ++i) {
            const auto li = g.find_link(r[i - 1], r[i]);
            if (!li) continue;
            const auto& link = g.link(*li);
            rep.network += hop_delay(link);
            if (link.wireless) rep.wireless += hop_delay(link);
        }
    }
    for (const auto& f : s.vfs) {
        const auto it = e.placements.find(f.id);
        if (it == e.placements.end() || !g.contains(it->second)) continue;
        const double rate = service_rate(g, f, it->second);
        double d = 0.0;
        bool stable = true;
        for (const auto& l : s.vls) {
            if (l.to != f.id) continue;
            if (!(rate - l.demand > 0.0)) {
                stable = false;
                break;
            }
            d += 1.0 / (rate - l.demand);
        }
        if (stable) rep.processing[f.id] = d;
    }
    rep.total = rep.network + rep.processing_total();
    return rep;
}

// ---------------------------------------------------------------------------
// Individual constraint checks

namespace detail {

inline void for_each_hop(const Route& r, const auto& fn) {
    for (std::size_t i = 1; i < r.size(); ++i) fn(r[i - 1], r[i]);
}

inline std::map<VfId, const VirtualFunction*> vf_index(const std::vector<ServiceSpec>& services) {
    std::map<VfId, const VirtualFunction*> out;
    for (const auto& s : services) {
        for (const auto& f : s.vfs) out[f.id] = &f;
    }
    return out;
}

/// Traffic carried per link index over valid hops.
inline std::map<std::size_t, double> link_load(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                               const Embedding& e) {
    std::map<std::size_t, double> load;
    for (const auto& s : services) {
        for (const auto& l : s.vls) {
            const auto it = e.routes.find(l.key());
            if (it == e.routes.end()) continue;
            for_each_hop(it->second, [&](NodeId x, NodeId y) {
                if (!g.contains(x) || !g.contains(y)) return;
                if (const auto li = g.find_link(x, y)) load[*li] += l.demand;
            });
        }
    }
    return load;
}

} // namespace detail

/// Hosted compute must not exceed node capacity.
inline std::vector<Violation> check_compute(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                            const Embedding& e) {
    const auto vfs = detail::vf_index(services);
    std::map<NodeId, double> used;
    auto add = [&](VfId v, NodeId n) {
        const auto it = vfs.find(v);
        if (it != vfs.end()) used[n] += it->second->compute;
    };
    for (const auto& [v, n] : e.placements) add(v, n);
    for (const auto& [v, hosts] : e.replicas) {
        for (const auto n : hosts) add(v, n);
    }
    std::vector<Violation> out;
    for (const auto& [n, c] : used) {
        const double cap = g.contains(n) ? g.node(n).compute : 0.0;
        if (c > cap + kTolerance) out.push_back({ViolationKind::Compute, Location::node(n), c, cap});
    }
    return out;
}

/// Every VF placed on an existing node; pinned VFs exactly at their pin.
inline std::vector<Violation> check_placement(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                              const Embedding& e) {
    std::vector<Violation> out;
    for (const auto& s : services) {
        for (const auto& f : s.vfs) {
            const auto it = e.placements.find(f.id);
            if (it == e.placements.end() || !g.contains(it->second)) {
                out.push_back({ViolationKind::VfUnplaced, Location::vf(f.id), 0.0, 1.0});
            } else if (f.pin && it->second != *f.pin) {
                out.push_back({ViolationKind::VfUnplaced, Location::vf(f.id), static_cast<double>(it->second.value),
                               static_cast<double>(f.pin->value)});
            }
        }
    }
    return out;
}

/// Aggregate VL demand per link within (1 - drop) * bandwidth.
inline std::vector<Violation> check_bandwidth(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                              const Embedding& e) {
    std::vector<Violation> out;
    for (const auto& [li, load] : detail::link_load(g, services, e)) {
        const auto& l = g.link(li);
        if (load > l.effective_bandwidth() + kTolerance) {
            out.push_back({ViolationKind::Bandwidth, Location::link(l.a, l.b), load, l.effective_bandwidth()});
        }
    }
    return out;
}

/// Every VL has a route.
inline std::vector<Violation> check_routing(const std::vector<ServiceSpec>& services, const Embedding& e) {
    std::vector<Violation> out;
    for (const auto& s : services) {
        for (const auto& l : s.vls) {
            const auto it = e.routes.find(l.key());
            if (it == e.routes.end() || it->second.empty()) {
                out.push_back({ViolationKind::VlUnrouted, Location::vl(l.key()), 0.0, 1.0});
            }
        }
    }
    return out;
}

namespace detail {

/// Per-VL unit-flow balance (out - in) per node over hops that are links.
inline std::map<NodeId, int> net_flow(const HardwareGraph& g, const Route& r) {
    std::map<NodeId, int> net;
    for_each_hop(r, [&](NodeId x, NodeId y) {
        if (!g.contains(x) || !g.contains(y) || !g.find_link(x, y)) return;
        ++net[x];
        --net[y];
    });
    return net;
}

inline NodeId host_of(const Embedding& e, VfId v) { return e.placements.at(v); }

inline bool hosts_known(const HardwareGraph& g, const Embedding& e, const VirtualLink& l) {
    const auto a = e.placements.find(l.from);
    const auto b = e.placements.find(l.to);
    return a != e.placements.end() && b != e.placements.end() && g.contains(a->second) && g.contains(b->second);
}

} // namespace detail

/// Flow conservation: every switch and PoA forwards what it receives and
/// the source host emits the VL. Route hops that are not links count as
/// broken flow. Audited per VL with unit flow so zero-demand VLs are
/// covered too.
inline std::vector<Violation> check_flow(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                         const Embedding& e) {
    std::map<Location, double> bad;
    for (const auto& s : services) {
        for (const auto& l : s.vls) {
            const auto it = e.routes.find(l.key());
            if (it == e.routes.end() || it->second.empty()) continue;
            const auto& r = it->second;
            detail::for_each_hop(r, [&](NodeId x, NodeId y) {
                if (!g.contains(x) || !g.contains(y) || !g.find_link(x, y)) bad[Location::link(x, y)] += 1.0;
            });
            if (!detail::hosts_known(g, e, l)) continue;
            const NodeId src = detail::host_of(e, l.from);
            const NodeId dst = detail::host_of(e, l.to);
            auto net = detail::net_flow(g, r);
            const int src_expected = src == dst ? 0 : 1;
            if (net[src] != src_expected) bad[Location::node(src)] += std::abs(net[src] - src_expected);
            for (const auto& [n, v] : net) {
                if (n == src || n == dst) continue;
                const auto kind = g.node(n).kind;
                if ((kind == NodeKind::Switch || kind == NodeKind::PoA) && v != 0) {
                    bad[Location::node(n)] += std::abs(v);
                }
            }
        }
    }
    std::vector<Violation> out;
    for (const auto& [loc, amount] : bad) out.push_back({ViolationKind::Flow, loc, amount, 0.0});
    return out;
}

/// The route of (v1, v2) must deliver its traffic at the node hosting v2.
inline std::vector<Violation> check_steering(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                             const Embedding& e) {
    std::vector<Violation> out;
    for (const auto& s : services) {
        for (const auto& l : s.vls) {
            const auto it = e.routes.find(l.key());
            if (it == e.routes.end() || it->second.empty() || !detail::hosts_known(g, e, l)) continue;
            const NodeId src = detail::host_of(e, l.from);
            const NodeId dst = detail::host_of(e, l.to);
            auto net = detail::net_flow(g, it->second);
            const int expected = src == dst ? 0 : -1;
            if (net[dst] != expected) {
                out.push_back({ViolationKind::SteerToVf, Location::vl(l.key()), static_cast<double>(net[dst]),
                               static_cast<double>(expected)});
            }
        }
    }
    return out;
}

/// End-to-end delay within the deadline.
inline std::vector<Violation> check_deadline(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                             const Embedding& e) {
    std::vector<Violation> out;
    for (const auto& s : services) {
        const auto rep = delay_report(g, s, e);
        if (rep.total > s.deadline + kTolerance) {
            out.push_back({ViolationKind::Deadline, Location::service(s.id), rep.total, s.deadline});
        }
    }
    return out;
}

/// Traffic may only use the robot-PoA link the robot is attached through.
inline std::vector<Violation> check_steer_if_attached(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                                      const Embedding& e) {
    std::vector<Violation> out;
    for (const auto& [li, load] : detail::link_load(g, services, e)) {
        (void)load;
        const auto& l = g.link(li);
        if (!l.wireless) continue;
        const NodeId robot = g.node(l.a).kind == NodeKind::Robot ? l.a : l.b;
        const NodeId poa = l.other(robot);
        const auto it = e.attachment.find(robot);
        if (it == e.attachment.end() || it->second != poa) {
            out.push_back({ViolationKind::SteerIfAttached, Location::link(robot, poa), 1.0, 0.0});
        }
    }
    return out;
}

/// Every robot attached to exactly one PoA it has a wireless link to.
inline std::vector<Violation> check_attachment(const HardwareGraph& g, const Embedding& e) {
    std::vector<Violation> out;
    for (const auto robot : g.nodes_of(NodeKind::Robot)) {
        const auto it = e.attachment.find(robot);
        if (it == e.attachment.end()) {
            out.push_back({ViolationKind::Attachment, Location::node(robot), 0.0, 1.0});
            continue;
        }
        const auto li = g.contains(it->second) ? g.find_link(robot, it->second) : std::nullopt;
        if (!li || !g.link(*li).wireless) {
            out.push_back({ViolationKind::Attachment, Location::node(robot), 0.0, 1.0});
        }
    }
    for (const auto& [robot, poa] : e.attachment) {
        if (!g.contains(robot) || g.node(robot).kind != NodeKind::Robot) {
            out.push_back({ViolationKind::Attachment, Location::node(robot), 1.0, 0.0});
        }
    }
    return out;
}

/// Traffic over each robot-PoA link within the effective channel capacity.
inline std::vector<Violation> check_wireless(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                             const Embedding& e, const RadioState& radio) {
    std::vector<Violation> out;
    for (const auto& [li, load] : detail::link_load(g, services, e)) {
        const auto& l = g.link(li);
        if (!l.wireless) continue;
        const NodeId robot = g.node(l.a).kind == NodeKind::Robot ? l.a : l.b;
        const NodeId poa = l.other(robot);
        const double cap = channel_capacity(l, radio.signal(robot, poa), radio.noise);
        if (load > cap + kTolerance) {
            out.push_back({ViolationKind::WirelessCapacity, Location::link(robot, poa), load, cap});
        }
    }
    return out;
}

/// Each placed VF's service rate exceeds every incoming VL's arrival rate.
inline std::vector<Violation> check_stability(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                              const Embedding& e) {
    std::vector<Violation> out;
    for (const auto& s : services) {
        for (const auto& f : s.vfs) {
            const auto it = e.placements.find(f.id);
            if (it == e.placements.end() || !g.contains(it->second)) continue;
            const double rate = service_rate(g, f, it->second);
            double worst = -1.0;
            for (const auto& l : s.vls) {
                if (l.to == f.id && !(rate - l.demand > 0.0)) worst = std::max(worst, l.demand);
            }
            if (worst >= 0.0) out.push_back({ViolationKind::Stability, Location::vf(f.id), worst, rate});
        }
    }
    return out;
}

/// All constraints; empty iff the embedding is feasible. Sorted by kind,
/// then location.
inline std::vector<Violation> check_embedding(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                              const Embedding& e, const RadioState& radio) {
    std::vector<Violation> out;
    auto append = [&out](std::vector<Violation> v) { out.insert(out.end(), v.begin(), v.end()); };
    append(check_compute(g, services, e));
    append(check_placement(g, services, e));
    append(check_bandwidth(g, services, e));
    append(check_routing(services, e));
    append(check_flow(g, services, e));
    append(check_steering(g, services, e));
    append(check_deadline(g, services, e));
    append(check_steer_if_attached(g, services, e));
    append(check_attachment(g, e));
    append(check_wireless(g, services, e, radio));
    append(check_stability(g, services, e));
    std::stable_sort(out.begin(), out.end(), violation_order);
    return out;
}

/// Edge cost: sum over nodes of cost * number of hosted VFs.
inline double objective(const HardwareGraph& g, const Embedding& e) {
    double total = 0.0;
    for (const auto& [v, n] : e.placements) {
        if (g.contains(n)) total += g.node(n).cost;
    }
    for (const auto& [v, hosts] : e.replicas) {
        for (const auto n : hosts) {
            if (g.contains(n)) total += g.node(n).cost;
        }
    }
    return total;
}

/// Compute on Edge servers used by the embedding over total Edge compute
/// of `reference` (the unstressed substrate).
inline double edge_usage(const HardwareGraph& reference, const std::vector<ServiceSpec>& services, const Embedding& e) {
    double capacity = 0.0;
    for (const auto& n : reference.nodes()) {
        if (n.kind == NodeKind::Server && is_edge(*n.tier)) capacity += n.compute;
    }
    if (capacity <= 0.0) return 0.0;
    const auto vfs = detail::vf_index(services);
    double used = 0.0;
    for (const auto& [v, n] : e.placements) {
        const auto& node = reference.node(n);
        const auto it = vfs.find(v);
        if (it != vfs.end() && node.kind == NodeKind::Server && is_edge(*node.tier)) used += it->second->compute;
    }
    return used / capacity;
}

} // namespace vfo

#endif // VFO_FEASIBILITY_HPP
