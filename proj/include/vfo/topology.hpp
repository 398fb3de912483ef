/**
 * @file topology.hpp
 * @brief Erdos-Renyi substrates with per-tier server redundancy.
 *
 * A G(n, p) core is sampled; twelve of its vertices become servers (six
 * Cloud, four far Edge, two near Edge) and the rest switches. Samples are
 * rejected until every server has its tier's number of links and can be
 * reached from the PoAs. Twelve PoAs, placed at the coordinates of a small
 * site list, hang off random switches; one robot links wirelessly to all.
 *
 * Random numbers come from std::mt19937_64 with hand-written uniform
 * mapping so that a seed gives the same graph with every standard library.
 */

#ifndef VFO_TOPOLOGY_HPP
#define VFO_TOPOLOGY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vfo/model.hpp"

namespace vfo {

/// P(deg(v) = k) in G(n, p): the Binomial(n - 1, p) pmf.
inline double degree_pmf(std::size_t n, double p, std::size_t k) {
    if (n == 0 || !(p >= 0.0 && p <= 1.0) || k > n - 1) {
        throw Error(Errc::DomainError, "degree_pmf needs n >= 1, 0 <= p <= 1, k <= n - 1");
    }
    const std::size_t m = n - 1;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == m ? 1.0 : 0.0;
    const double log_choose = std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                              std::lgamma(static_cast<double>(m - k) + 1.0);
    return std::exp(log_choose + static_cast<double>(k) * std::log(p) +
                    static_cast<double>(m - k) * std::log1p(-p));
}

/// P(deg(v) >= k) in G(n, p); 0 when k exceeds the maximum degree n - 1.
inline double degree_tail(std::size_t n, double p, std::size_t k) {
    if (n == 0 || !(p >= 0.0 && p <= 1.0)) throw Error(Errc::DomainError, "degree_tail needs n >= 1, 0 <= p <= 1");
    if (k == 0) return 1.0;
    if (k > n - 1) return 0.0;
    double below = 0.0;
    for (std::size_t j = 0; j < k; ++j) below += degree_pmf(n, p, j);
    double above = 0.0;
    for (std::size_t j = k; j <= n - 1; ++j) above += degree_pmf(n, p, j);
    // Sum the shorter side to keep rounding small.
    return k <= (n - 1) / 2 ? std::max(0.0, 1.0 - below) : std::min(1.0, above);
}

struct TierRequirement {
    std::size_t count = 0;
    std::size_t redundant_links = 0;

    bool operator==(const TierRequirement&) const = default;
};

struct TierRedundancySpec {
    TierRequirement cloud{6, 6};
    TierRequirement far_edge{4, 4};
    TierRequirement near_edge{2, 2};

    [[nodiscard]] std::size_t servers() const { return cloud.count + far_edge.count + near_edge.count; }
    [[nodiscard]] const TierRequirement& operator[](Tier t) const {
        switch (t) {
        case Tier::Cloud: return cloud;
        case Tier::FarEdge: return far_edge;
        case Tier::NearEdge: return near_edge;
        }
        return cloud;
    }

    bool operator==(const TierRedundancySpec&) const = default;
};

struct PInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const PInterval&) const = default;
};

/// Values of p on a grid of `step` where every tier's redundant-link count
/// is met by a single vertex with probability at least `confidence`,
/// merged into closed intervals.
inline std::vector<PInterval> feasible_region(std::size_t n, const TierRedundancySpec& spec, double confidence,
                                              double step = 0.001) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw Error(Errc::DomainError, "confidence must lie in (0,1)");
    if (!(step > 0.0 && step <= 1.0)) throw Error(Errc::DomainError, "grid step must lie in (0,1]");
    std::size_t need = 0;
    for (const auto t : {Tier::Cloud, Tier::FarEdge, Tier::NearEdge}) {
        if (spec[t].count > 0) need = std::max(need, spec[t].redundant_links);
    }
    std::vector<PInterval> out;
    const auto points = static_cast<std::size_t>(std::llround(1.0 / step));
    bool open = false;
    for (std::size_t i = 0; i <= points; ++i) {
        const double p = std::min(1.0, static_cast<double>(i) * step);
        const bool ok = degree_tail(n, p, need) >= confidence;
        if (ok && !open) out.push_back({p, p});
        if (ok) out.back().hi = p;
        open = ok;
    }
    if (out.empty()) throw Error(Errc::EmptyRegion, "no p meets the redundancy requirement");
    return out;
}

/// Smallest grid value of p in the feasible region.
inline double minimal_feasible_p(std::size_t n, const TierRedundancySpec& spec = {}, double confidence = 0.9) {
    return feasible_region(n, spec, confidence).front().lo;
}

struct PoaSite {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const PoaSite&) const = default;
};

/// Twelve PoA sites of an industrial estate (synthetic coordinates).
inline std::vector<PoaSite> default_poa_sites() {
    return {
        {"poa01", 40.330000, -3.765000}, {"poa02", 40.331350, -3.764100}, {"poa03", 40.332600, -3.762900},
        {"poa04", 40.333900, -3.761800}, {"poa05", 40.334500, -3.759900}, {"poa06", 40.333500, -3.758300},
        {"poa07", 40.332200, -3.757100}, {"poa08", 40.330900, -3.756000}, {"poa09", 40.329500, -3.755300},
        {"poa10", 40.328200, -3.756600}, {"poa11", 40.327300, -3.758300}, {"poa12", 40.327100, -3.760400},
    };
}

/// Reads `poa_id,lat,lon` rows after a header line.
inline std::vector<PoaSite> read_poa_sites(std::istream& in) {
    std::vector<PoaSite> out;
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::ParseError, "empty PoA site file");
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        PoaSite s;
        std::string lat;
        std::string lon;
        if (!std::getline(ss, s.id, ',') || !std::getline(ss, lat, ',') || !std::getline(ss, lon)) {
            throw Error(Errc::ParseError, "PoA site row " + std::to_string(row) + " needs three fields");
        }
        try {
            s.lat = std::stod(lat);
            s.lon = std::stod(lon);
        } catch (const std::exception&) {
            throw Error(Errc::ParseError, "PoA site row " + std::to_string(row) + " has a bad coordinate");
        }
        out.push_back(std::move(s));
    }
    return out;
}

/// Equirectangular projection in metres around the first site.
inline std::vector<Position> project_sites(const std::vector<PoaSite>& sites) {
    std::vector<Position> out;
    if (sites.empty()) return out;
    constexpr double kEarthRadius = 6371000.0;
    const double lat0 = sites.front().lat * std::numbers::pi / 180.0;
    for (const auto& s : sites) {
        const double dlat = (s.lat - sites.front().lat) * std::numbers::pi / 180.0;
        const double dlon = (s.lon - sites.front().lon) * std::numbers::pi / 180.0;
        out.push_back({kEarthRadius * dlon * std::cos(lat0), kEarthRadius * dlat});
    }
    return out;
}

/// Uniform draws from mt19937_64 with a fixed mapping.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) {
        const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

/// Edge list of one G(n, p) sample over vertices 0..n-1.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_gnp(std::size_t n, double p, Rng& rng) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (rng.uniform() < p) edges.emplace_back(i, j);
        }
    }
    return edges;
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const Range&) const = default;
};

/// Attribute distributions of generated substrates. Delays in ms, bandwidth
/// in Mbps; server links draw their delay from the farther tier's range.
struct LinkDistributions {
    Range bandwidth{100.0, 1000.0};
    Range switch_delay{0.5, 2.0};
    Range poa_delay{0.5, 1.5};
    Range near_edge_delay{0.2, 1.0};
    Range far_edge_delay{1.0, 3.0};
    Range cloud_delay{12.0, 24.0}; // nearest Cloud from a PoA lands around 15 ms
    double wireless_bandwidth = 200.0;

    bool operator==(const LinkDistributions&) const = default;
};

struct TopologyParams {
    std::size_t n = 48;
    double p = 0.2;
    TierRedundancySpec spec;
    std::uint64_t seed = 1;
    std::size_t max_resamples = 1000;
    LinkDistributions links;
    CostTable costs{1.0, 8.0, 16.0};
    double cloud_compute = 64.0;
    double far_edge_compute = 32.0;
    double near_edge_compute = 16.0;
    double server_rate = 50.0;
    double robot_compute = 2.0;
    double robot_rate = 50.0;
    std::vector<PoaSite> sites = default_poa_sites();
};

namespace detail {

inline double draw(Rng& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

/// Servers adjacent to a switch that, through switches only, reaches every
/// PoA's switch. Returns false when some server or PoA is cut off.
inline bool servers_reachable(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                              const std::vector<bool>& is_server, const std::vector<std::uint32_t>& poa_switch) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::uint32_t> stack{poa_switch.front()};
    seen[poa_switch.front()] = true;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (const auto v : adj[u]) {
            if (seen[v] || is_server[v]) continue;
            seen[v] = true;
            stack.push_back(v);
        }
    }
    for (const auto s : poa_switch) {
        if (!seen[s]) return false;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!is_server[v]) continue;
        bool touches = false;
        for (const auto w : adj[v]) touches = touches || (!is_server[w] && seen[w]);
        if (!touches) return false;
    }
    return true;
}

} // namespace detail

/// Core vertices are 0..n-1, PoAs n..n+sites-1, the robot last.
inline HardwareGraph generate(const TopologyParams& prm) {
    const auto& spec = prm.spec;
    const std::size_t servers = spec.servers();
    if (!(prm.p >= 0.0 && prm.p <= 1.0)) throw Error(Errc::DomainError, "p must lie in [0,1]");
    if (prm.n < servers + 1) throw Error(Errc::DomainError, "n must exceed the number of servers");
    if (prm.sites.empty()) throw Error(Errc::DomainError, "at least one PoA site is required");

    Rng rng(prm.seed);
    const auto positions = project_sites(prm.sites);
    const std::vector<std::pair<Tier, std::size_t>> tiers{
        {Tier::Cloud, spec.cloud.count}, {Tier::FarEdge, spec.far_edge.count}, {Tier::NearEdge, spec.near_edge.count}};

    for (std::size_t attempt = 0; attempt < prm.max_resamples; ++attempt) {
        auto edges = sample_gnp(prm.n, prm.p, rng);
        std::vector<std::uint32_t> order(prm.n);
        for (std::uint32_t i = 0; i < prm.n; ++i) order[i] = i;
        rng.shuffle(order);

        std::vector<std::optional<Tier>> tier(prm.n);
        std::size_t next = 0;
        for (const auto& [t, count] : tiers) {
            for (std::size_t i = 0; i < count; ++i) tier[order[next++]] = t;
        }
        std::vector<bool> is_server(prm.n);
        for (std::size_t v = 0; v < prm.n; ++v) is_server[v] = tier[v].has_value();

        std::vector<std::size_t> degree(prm.n, 0);
        for (const auto& [a, b] : edges) {
            ++degree[a];
            ++degree[b];
        }
        bool redundant = true;
        for (std::size_t v = 0; v < prm.n; ++v) {
            if (tier[v] && degree[v] < spec[*tier[v]].redundant_links) redundant = false;
        }

        std::vector<std::uint32_t> switches(order.begin() + static_cast<std::ptrdiff_t>(servers), order.end());
        std::sort(switches.begin(), switches.end());
        std::vector<std::uint32_t> poa_switch;
        for (std::size_t i = 0; i < prm.sites.size(); ++i) poa_switch.push_back(switches[rng.index(switches.size())]);
        if (!redundant || !detail::servers_reachable(prm.n, edges, is_server, poa_switch)) continue;

        std::vector<Node> nodes;
        for (std::uint32_t v = 0; v < prm.n; ++v) {
            Node node;
            node.id = NodeId{v};
            if (tier[v]) {
                node.kind = NodeKind::Server;
                node.tier = tier[v];
                node.name = std::string(to_string(*tier[v])) + "-" + std::to_string(v);
                node.cost = prm.costs(*tier[v]);
                node.rate = prm.server_rate;
                node.compute = *tier[v] == Tier::Cloud     ? prm.cloud_compute
                               : *tier[v] == Tier::FarEdge ? prm.far_edge_compute
                                                           : prm.near_edge_compute;
            } else {
                node.kind = NodeKind::Switch;
                node.name = "sw-" + std::to_string(v);
            }
            nodes.push_back(std::move(node));
        }
        for (std::size_t i = 0; i < prm.sites.size(); ++i) {
            Node poa;
            poa.id = NodeId{static_cast<std::uint32_t>(prm.n + i)};
            poa.kind = NodeKind::PoA;
            poa.name = prm.sites[i].id;
            poa.position = positions[i];
            nodes.push_back(std::move(poa));
        }
        Node robot;
        robot.id = NodeId{static_cast<std::uint32_t>(prm.n + prm.sites.size())};
        robot.kind = NodeKind::Robot;
        robot.name = "robot";
        robot.compute = prm.robot_compute;
        robot.rate = prm.robot_rate;
        robot.position = positions.front();
        nodes.push_back(robot);

        auto server_range = [&](Tier t) -> const Range& {
            switch (t) {
            case Tier::Cloud: return prm.links.cloud_delay;
            case Tier::FarEdge: return prm.links.far_edge_delay;
            case Tier::NearEdge: return prm.links.near_edge_delay;
            }
            return prm.links.cloud_delay;
        };
        std::vector<Link> links;
        for (const auto& [a, b] : edges) {
            Link l;
            l.a = NodeId{a};
            l.b = NodeId{b};
            l.bandwidth = detail::draw(rng, prm.links.bandwidth);
            if (tier[a] || tier[b]) {
                const Tier far = !tier[a]   ? *tier[b]
                                 : !tier[b] ? *tier[a]
                                            : std::max(*tier[a], *tier[b]);
                l.delay = detail::draw(rng, server_range(far));
            } else {
                l.delay = detail::draw(rng, prm.links.switch_delay);
            }
            links.push_back(l);
        }
        for (std::size_t i = 0; i < prm.sites.size(); ++i) {
            Link l;
            l.a = NodeId{static_cast<std::uint32_t>(prm.n + i)};
            l.b = NodeId{poa_switch[i]};
            l.bandwidth = detail::draw(rng, prm.links.bandwidth);
            l.delay = detail::draw(rng, prm.links.poa_delay);
            links.push_back(l);
        }
        for (std::size_t i = 0; i < prm.sites.size(); ++i) {
            Link l;
            l.a = robot.id;
            l.b = NodeId{static_cast<std::uint32_t>(prm.n + i)};
            l.bandwidth = prm.links.wireless_bandwidth;
            links.push_back(l);
        }
        try {
            return build_graph(std::move(nodes), std::move(links));
        } catch (const Error& e) {
            if (e.code() != Errc::DisconnectedCore) throw;
        }
    }
    throw Error(Errc::RejectionLimit, "no sample met the redundancy requirement after " +
                                          std::to_string(prm.max_resamples) + " draws");
}

} // namespace vfo

#endif // VFO_TOPOLOGY_HPP
