/**
 * @file oracle.hpp
 * @brief Exhaustive optimum for small instances and the bin-packing view.
 *
 * optimal_solve enumerates attachments, then placements of every unpinned
 * VF on every server (depth first, pruned on compute, stability, partial
 * processing delay and the best cost so far), then the k shortest paths of
 * every VL. Each complete candidate is judged by check_embedding.
 *
 * Among feasible embeddings the winner is the lexicographic minimum of
 * (cost, servers used, total delay, placements, routes). The server count
 * matters when every server costs the same: cost alone is then constant.
 */

#ifndef VFO_ORACLE_HPP
#define VFO_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "vfo/dlmd.hpp"
#include "vfo/feasibility.hpp"
#include "vfo/model.hpp"
#include "vfo/paths.hpp"

namespace vfo {

struct OracleOptions {
    std::size_t k_paths = 3;
    double budget = 1e7; // bound on |servers|^|unpinned VFs| * attachment combinations
};

struct OracleResult {
    Embedding embedding;
    double cost = 0.0;
    std::size_t servers_used = 0;
    double total_delay = 0.0; // ms, summed over services
};

namespace detail {

struct OracleSearch {
    const HardwareGraph& g;
    const std::vector<ServiceSpec>& services;
    const RadioState& radio;
    OracleOptions opts;

    struct Slot {
        const ServiceSpec* service;
        const VirtualFunction* vf;
    };
    std::vector<Slot> slots; // unpinned VFs in service then chain order
    std::vector<NodeId> servers;
    double min_server_cost = 0.0;

    std::optional<OracleResult> best;

    // Mutable search state.
    Embedding current;
    std::vector<double> compute_left;
    std::map<NodeId, int> server_load;
    std::map<ServiceId, double> processing;

    OracleSearch(const HardwareGraph& graph, const std::vector<ServiceSpec>& svcs, const RadioState& r,
                 OracleOptions o)
        : g(graph), services(svcs), radio(r), opts(o) {
        for (const auto& s : services) {
            for (const auto& f : s.vfs) {
                if (!f.pin) slots.push_back({&s, &f});
            }
        }
        servers = g.nodes_of(NodeKind::Server);
        min_server_cost = std::numeric_limits<double>::infinity();
        for (const auto n : servers) min_server_cost = std::min(min_server_cost, g.node(n).cost);
        if (servers.empty()) min_server_cost = 0.0;
    }

    [[nodiscard]] std::optional<double> vf_processing(const ServiceSpec& s, const VirtualFunction& f,
                                                      NodeId host) const {
        const double rate = service_rate(g, f, host);
        double d = 0.0;
        for (const auto& l : s.vls) {
            if (l.to != f.id) continue;
            if (!(rate - l.demand > 0.0)) return std::nullopt;
            d += 1.0 / (rate - l.demand);
        }
        return d;
    }

    [[nodiscard]] double placed_cost() const { return objective(g, current); }

    [[nodiscard]] bool dominated(double lower_cost, std::size_t servers_now) const {
        if (!best) return false;
        if (lower_cost > best->cost + kTolerance) return true;
        return std::abs(lower_cost - best->cost) <= kTolerance && servers_now > best->servers_used;
    }

    std::vector<Route> candidate_paths(NodeId from, NodeId to, double demand) const {
        if (from == to) return {{from}};
        auto cost = [&](const Link& l, std::size_t) -> std::optional<double> {
            double cap = l.effective_bandwidth();
            if (l.wireless) {
                const NodeId robot = g.node(l.a).kind == NodeKind::Robot ? l.a : l.b;
                const auto it = current.attachment.find(robot);
                if (it == current.attachment.end() || it->second != l.other(robot)) return std::nullopt;
                cap = channel_capacity(l, radio.signal(robot, l.other(robot)), radio.noise);
            }
            if (cap + kTolerance < demand) return std::nullopt;
            return hop_delay(l);
        };
        return k_shortest_paths(g, from, to, opts.k_paths, cost);
    }

    static bool better(const OracleResult& x, const OracleResult& y) {
        return std::tie(x.cost, x.servers_used, x.total_delay, x.embedding.placements, x.embedding.routes) <
               std::tie(y.cost, y.servers_used, y.total_delay, y.embedding.placements, y.embedding.routes);
    }

    void evaluate_leaf() {
        std::vector<const VirtualLink*> vls;
        std::vector<std::vector<Route>> options;
        for (const auto& s : services) {
            for (const auto& l : s.vls) {
                auto paths = candidate_paths(current.placements.at(l.from), current.placements.at(l.to), l.demand);
                if (paths.empty()) return;
                vls.push_back(&l);
                options.push_back(std::move(paths));
            }
        }
        const double cost = placed_cost();
        const auto used = server_load.size();
        std::vector<std::size_t> pick(vls.size(), 0);
        while (true) {
            for (std::size_t i = 0; i < vls.size(); ++i) current.routes[vls[i]->key()] = options[i][pick[i]];
            if (check_embedding(g, services, current, radio).empty()) {
                OracleResult r{current, cost, used, 0.0};
                for (const auto& s : services) r.total_delay += delay_report(g, s, current).total;
                if (!best || better(r, *best)) best = std::move(r);
            }
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
            if (i == pick.size()) break;
        }
        current.routes.clear();
    }

    void place(std::size_t depth) {
        const double lower = placed_cost() + static_cast<double>(slots.size() - depth) * min_server_cost;
        if (dominated(lower, server_load.size())) return;
        if (depth == slots.size()) {
            evaluate_leaf();
            return;
        }
        const auto& [s, f] = slots[depth];
        for (const auto n : servers) {
            if (compute_left[n.value] + kTolerance < f->compute) continue;
            const auto pro = vf_processing(*s, *f, n);
            if (!pro) continue;
            if (processing[s->id] + *pro > s->deadline + kTolerance) continue;
            current.placements[f->id] = n;
            compute_left[n.value] -= f->compute;
            ++server_load[n];
            processing[s->id] += *pro;
            place(depth + 1);
            processing[s->id] -= *pro;
            if (--server_load[n] == 0) server_load.erase(n);
            compute_left[n.value] += f->compute;
            current.placements.erase(f->id);
        }
    }

    /// Pinned VFs go first; returns false when a pin is already infeasible.
    bool seed_pins() {
        compute_left.assign(g.size(), 0.0);
        for (const auto& n : g.nodes()) compute_left[n.id.value] = n.compute;
        for (const auto& s : services) {
            processing[s.id] = 0.0;
            for (const auto& f : s.vfs) {
                if (!f.pin) continue;
                const auto pro = vf_processing(s, f, *f.pin);
                if (!pro) return false;
                current.placements[f.id] = *f.pin;
                compute_left[f.pin->value] -= f.compute;
                processing[s.id] += *pro;
                if (g.node(*f.pin).kind == NodeKind::Server) ++server_load[*f.pin];
            }
        }
        return true;
    }

    void run() {
        std::set<NodeId> busy;
        for (const auto& s : services) {
            if (const auto r = robot_of(s, g)) busy.insert(*r);
        }
        const std::vector<NodeId> robots(busy.begin(), busy.end());

        double combos = std::pow(static_cast<double>(servers.size()), static_cast<double>(slots.size()));
        for (const auto r : robots) combos *= static_cast<double>(g.poas_of(r).size());
        if (combos > opts.budget) {
            throw Error(Errc::BudgetExceeded, "enumeration needs " + std::to_string(combos) + " combinations");
        }

        Embedding base;
        const Residual res(g);
        for (const auto robot : g.nodes_of(NodeKind::Robot)) {
            if (busy.count(robot)) continue;
            base.attachment[robot] = select_poa(g, robot, g.poas_of(robot), radio, {}, CapacityView::Effective, &res);
        }

        std::vector<std::size_t> pick(robots.size(), 0);
        while (true) {
            current = base;
            server_load.clear();
            processing.clear();
            for (std::size_t i = 0; i < robots.size(); ++i) current.attachment[robots[i]] = g.poas_of(robots[i])[pick[i]];
            if (seed_pins()) place(0);
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == g.poas_of(robots[i]).size()) pick[i++] = 0;
            if (i == pick.size()) break;
        }
    }
};

} // namespace detail

/// Feasible embedding minimising the Edge cost; throws Infeasible when none
/// exists within the k-shortest-path routing space.
inline OracleResult optimal_solve(const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                                  const RadioState& radio, const OracleOptions& opts = {}) {
    validate_services(g, services);
    detail::OracleSearch search(g, services, radio, opts);
    search.run();
    if (!search.best) throw Error(Errc::Infeasible, "no feasible embedding");
    return *search.best;
}

struct BinPackingInstance {
    double bin_capacity = 0.0;
    std::vector<double> item_sizes;

    bool operator==(const BinPackingInstance&) const = default;
};

/// Services of the form robot-VF -> offloadable VF with a zero-demand link
/// and no deadline map onto bin packing with the offloadable VFs as items.
inline BinPackingInstance reduce_to_binpacking(const std::vector<ServiceSpec>& services, double server_capacity) {
    if (!(server_capacity > 0.0)) throw Error(Errc::NotIdeal, "server capacity must be positive");
    BinPackingInstance out;
    out.bin_capacity = server_capacity;
    for (const auto& s : services) {
        const auto why = "service " + std::to_string(s.id.value) + ": ";
        if (s.vfs.size() != 2) throw Error(Errc::NotIdeal, why + "needs exactly two VFs");
        if (!s.vfs[0].pin) throw Error(Errc::NotIdeal, why + "first VF must be pinned");
        if (s.vfs[1].pin) throw Error(Errc::NotIdeal, why + "second VF must be offloadable");
        if (s.vls.size() != 1 || s.vls[0].from != s.vfs[0].id || s.vls[0].to != s.vfs[1].id) {
            throw Error(Errc::NotIdeal, why + "needs a single link from the first VF to the second");
        }
        if (s.vls[0].demand != 0.0) throw Error(Errc::NotIdeal, why + "link demand must be zero");
        if (!std::isinf(s.deadline)) throw Error(Errc::NotIdeal, why + "deadline must be infinite");
        if (s.vfs[1].compute > server_capacity) throw Error(Errc::NotIdeal, why + "item exceeds bin capacity");
        out.item_sizes.push_back(s.vfs[1].compute);
    }
    return out;
}

/// Exact minimum bin count by enumerating set partitions (at most 10 items).
inline std::size_t binpack_bruteforce(const BinPackingInstance& inst) {
    const auto n = inst.item_sizes.size();
    if (n > 10) throw Error(Errc::BudgetExceeded, "bin packing brute force is limited to 10 items");
    for (const auto s : inst.item_sizes) {
        if (s > inst.bin_capacity + kTolerance) throw Error(Errc::DomainError, "item larger than a bin");
    }
    std::size_t best = n;
    std::vector<double> bins;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (bins.size() >= best) return;
        if (i == n) {
            best = bins.size();
            return;
        }
        const double size = inst.item_sizes[i];
        // Indexing, not references: deeper calls may grow `bins`.
        for (std::size_t b = 0; b < bins.size(); ++b) {
            if (bins[b] + size <= inst.bin_capacity + kTolerance) {
                bins[b] += size;
                self(self, i + 1);
                bins[b] -= size;
            }
        }
        bins.push_back(size);
        self(self, i + 1);
        bins.pop_back();
    };
    if (n > 0) rec(rec, 0);
    return n == 0 ? 0 : best;
}

} // namespace vfo

#endif // VFO_ORACLE_HPP
