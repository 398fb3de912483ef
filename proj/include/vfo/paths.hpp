/**
 * @file paths.hpp
 * @brief Shortest paths over the substrate under the relay rule.
 *
 * Only switches forward traffic. A PoA forwards only on the hop to or from
 * a robot; servers and robots are always path endpoints. Link costs come
 * from a caller-supplied function returning std::nullopt for unusable links.
 */

#ifndef VFO_PATHS_HPP
#define VFO_PATHS_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "vfo/model.hpp"

namespace vfo {

/// Can traffic arriving from `prev` be forwarded by `via` towards `next`?
inline bool can_relay(const HardwareGraph& g, NodeId prev, NodeId via, NodeId next) {
    switch (g.node(via).kind) {
    case NodeKind::Switch: return true;
    case NodeKind::PoA:
        return g.node(prev).kind == NodeKind::Robot || g.node(next).kind == NodeKind::Robot;
    default: return false;
    }
}

/// True when consecutive nodes are linked, no node repeats and every
/// intermediate node may relay.
inline bool is_valid_path(const HardwareGraph& g, const Route& path) {
    if (path.empty()) return false;
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!g.contains(path[i]) || !seen.insert(path[i]).second) return false;
        if (i > 0 && !g.find_link(path[i - 1], path[i])) return false;
        if (i > 0 && i + 1 < path.size() && !can_relay(g, path[i - 1], path[i], path[i + 1])) return false;
    }
    return true;
}

template <class CostFn>
double path_cost(const HardwareGraph& g, const Route& path, CostFn&& cost) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto li = *g.find_link(path[i - 1], path[i]);
        const auto c = cost(g.link(li), li);
        if (!c) return std::numeric_limits<double>::infinity();
        total += *c;
    }
    return total;
}

/// Single-source shortest paths. Each node has two search states: PoAs
/// entered from a robot may forward anywhere, otherwise only to robots.
class ShortestPathTree {
public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    template <class CostFn>
    ShortestPathTree(const HardwareGraph& g, NodeId source, CostFn&& cost, const std::set<NodeId>& banned_nodes = {},
                     const std::set<std::size_t>& banned_links = {}, std::optional<NodeId> arrived_from = std::nullopt)
        : graph_(&g), source_(source), dist_(2 * g.size(), kInf), pred_(2 * g.size(), kNone) {
        using Entry = std::tuple<double, std::uint32_t, std::size_t>; // (dist, node id, state)
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        const bool source_flag = arrived_from && g.node(*arrived_from).kind == NodeKind::Robot;
        const std::size_t s0 = state(source, source_flag);
        dist_[s0] = 0.0;
        heap.emplace(0.0, source.value, s0);
        std::vector<bool> done(dist_.size(), false);

        while (!heap.empty()) {
            const auto [d, uid, s] = heap.top();
            heap.pop();
            if (done[s]) continue;
            done[s] = true;
            const NodeId u{uid};
            const bool from_robot = (s % 2) == 1;
            const auto kind = g.node(u).kind;
            const bool is_source = u == source;
            if (!is_source && kind != NodeKind::Switch && kind != NodeKind::PoA) continue;

            for (const auto& adj : g.neighbors(u)) {
                const NodeId v = adj.neighbor;
                if (banned_nodes.count(v) || banned_links.count(adj.link)) continue;
                if (kind == NodeKind::PoA) {
                    // Forwarding through a PoA needs a robot on one side.
                    const bool prev_robot = is_source ? source_flag : from_robot;
                    const bool relaying = !is_source || arrived_from.has_value();
                    if (relaying && !prev_robot && g.node(v).kind != NodeKind::Robot) continue;
                }
                const auto c = cost(g.link(adj.link), adj.link);
                if (!c) continue;
                const bool flag = g.node(v).kind == NodeKind::PoA && kind == NodeKind::Robot;
                const std::size_t t = state(v, flag);
                if (done[t]) continue;
                const double nd = d + *c;
                if (nd < dist_[t] || (nd == dist_[t] && pred_[t] != kNone && s < pred_[t])) {
                    dist_[t] = nd;
                    pred_[t] = s;
                    heap.emplace(nd, v.value, t);
                }
            }
        }
    }

    [[nodiscard]] double distance(NodeId target) const {
        return std::min(dist_[state(target, false)], dist_[state(target, true)]);
    }

    [[nodiscard]] bool reachable(NodeId target) const { return distance(target) < kInf; }

    /// Node path from the source to target, empty when unreachable.
    [[nodiscard]] Route path_to(NodeId target) const {
        const std::size_t a = state(target, false);
        const std::size_t b = state(target, true);
        std::size_t s = dist_[b] < dist_[a] ? b : a;
        if (!(dist_[s] < kInf)) return {};
        Route out;
        while (s != kNone) {
            out.push_back(NodeId{static_cast<std::uint32_t>(s / 2)});
            s = pred_[s];
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    static std::size_t state(NodeId n, bool from_robot) { return 2 * n.value + (from_robot ? 1 : 0); }

    const HardwareGraph* graph_;
    NodeId source_;
    std::vector<double> dist_;
    std::vector<std::size_t> pred_;
};

template <class CostFn>
Route shortest_path(const HardwareGraph& g, NodeId from, NodeId to, CostFn&& cost) {
    if (from == to) return {from};
    return ShortestPathTree(g, from, cost).path_to(to);
}

/// Up to k loopless paths in ascending cost (Yen). Equal-cost paths are
/// ordered lexicographically by node ids.
template <class CostFn>
std::vector<Route> k_shortest_paths(const HardwareGraph& g, NodeId from, NodeId to, std::size_t k, CostFn&& cost) {
    std::vector<Route> accepted;
    if (k == 0) return accepted;
    if (from == to) return {{from}};
    auto first = ShortestPathTree(g, from, cost).path_to(to);
    if (first.empty()) return accepted;
    accepted.push_back(std::move(first));

    std::set<std::pair<double, Route>> candidates;
    while (accepted.size() < k) {
        const Route& last = accepted.back();
        for (std::size_t i = 0; i + 1 < last.size(); ++i) {
            const NodeId spur = last[i];
            const Route root(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            std::set<std::size_t> banned_links;
            for (const auto& p : accepted) {
                if (p.size() > i + 1 && std::equal(root.begin(), root.end(), p.begin())) {
                    banned_links.insert(*g.find_link(p[i], p[i + 1]));
                }
            }
            std::set<NodeId> banned_nodes(root.begin(), root.end() - 1);
            const std::optional<NodeId> prev = i > 0 ? std::optional<NodeId>(root[i - 1]) : std::nullopt;
            ShortestPathTree tree(g, spur, cost, banned_nodes, banned_links, prev);
            auto tail = tree.path_to(to);
            if (tail.empty()) continue;
            Route total = root;
            total.insert(total.end(), tail.begin() + 1, tail.end());
            if (!is_valid_path(g, total)) continue;
            const double c = path_cost(g, total, cost);
            if (std::find(accepted.begin(), accepted.end(), total) == accepted.end()) {
                candidates.emplace(c, std::move(total));
            }
        }
        if (candidates.empty()) break;
        accepted.push_back(candidates.begin()->second);
        candidates.erase(candidates.begin());
    }
    return accepted;
}

} // namespace vfo

#endif // VFO_PATHS_HPP
