/**
 * @file sim.hpp
 * @brief Time-stepped episodes and background-load sweeps.
 *
 * An episode moves one robot along a waypoint trace, recomputes signal
 * strengths, re-solves with the chosen algorithm at every step and audits
 * the result with check_embedding. Solver failures are recorded, never
 * propagated. Migrations and handovers are counted against the last step
 * that produced an embedding.
 */

#ifndef VFO_SIM_HPP
#define VFO_SIM_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfo/baselines.hpp"
#include "vfo/dlmd.hpp"
#include "vfo/feasibility.hpp"
#include "vfo/model.hpp"
#include "vfo/oracle.hpp"
#include "vfo/topology.hpp"

namespace vfo {

struct Waypoint {
    double t = 0.0; // s
    double x = 0.0; // m
    double y = 0.0; // m

    bool operator==(const Waypoint&) const = default;
};

struct MobilityTrace {
    NodeId robot;
    double step = 1.0;       // s
    double duration = 200.0; // s
    std::vector<Waypoint> waypoints;

    bool operator==(const MobilityTrace&) const = default;

    void validate() const {
        if (!(step > 0.0) || !(duration > 0.0)) throw Error(Errc::ScenarioInvalid, "trace step and duration must be > 0");
        if (waypoints.empty()) throw Error(Errc::ScenarioInvalid, "trace has no waypoints");
        for (std::size_t i = 1; i < waypoints.size(); ++i) {
            if (!(waypoints[i].t > waypoints[i - 1].t)) {
                throw Error(Errc::ScenarioInvalid, "waypoint times must increase strictly");
            }
        }
    }

    /// Sample times 0, step, 2 step, ... strictly before `duration`.
    [[nodiscard]] std::vector<double> times() const {
        std::vector<double> out;
        const auto count = static_cast<std::size_t>(std::ceil(duration / step - 1e-9));
        for (std::size_t k = 0; k < count; ++k) out.push_back(static_cast<double>(k) * step);
        return out;
    }

    /// Linear interpolation between waypoints, clamped at both ends.
    [[nodiscard]] Position position_at(double t) const {
        if (t <= waypoints.front().t) return {waypoints.front().x, waypoints.front().y};
        if (t >= waypoints.back().t) return {waypoints.back().x, waypoints.back().y};
        const auto hi = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                         [](double v, const Waypoint& w) { return v < w.t; });
        const auto lo = hi - 1;
        const double f = (t - lo->t) / (hi->t - lo->t);
        return {lo->x + f * (hi->x - lo->x), lo->y + f * (hi->y - lo->y)};
    }
};

/// Where signal strengths come from: a per-step table, or log-distance path
/// loss sigma = P * (1 + d / d0)^-exponent with optional log-normal shadowing.
struct SignalModel {
    enum class Mode { Table, PathLoss };
    Mode mode = Mode::PathLoss;

    double reference_power = 1.0;        // linear, used when a PoA has no own power
    double exponent = 3.0;
    double reference_distance = 1.0;     // m
    std::map<NodeId, double> poa_power;  // linear transmit power per PoA
    double shadowing_db = 0.0;           // standard deviation; 0 disables

    std::vector<std::map<NodeId, double>> table; // step -> PoA -> sigma

    bool operator==(const SignalModel&) const = default;

    [[nodiscard]] double path_loss(NodeId poa, double d) const {
        const auto it = poa_power.find(poa);
        const double p = it == poa_power.end() ? reference_power : it->second;
        return p * std::pow(1.0 + d / reference_distance, -exponent);
    }
};

enum class Algorithm { Dlmd, LatencyAgnostic, RadioAgnostic, Oracle };

constexpr std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::Dlmd: return "dlmd";
    case Algorithm::LatencyAgnostic: return "latency-agnostic";
    case Algorithm::RadioAgnostic: return "radio-agnostic";
    case Algorithm::Oracle: return "oracle";
    }
    return "?";
}

/// The two baselines are minimal reconstructions from described failure
/// modes, not implementations of published algorithms.
constexpr bool is_reconstruction(Algorithm a) noexcept {
    return a == Algorithm::LatencyAgnostic || a == Algorithm::RadioAgnostic;
}

inline Algorithm parse_algorithm(std::string_view s) {
    for (const auto a : {Algorithm::Dlmd, Algorithm::LatencyAgnostic, Algorithm::RadioAgnostic, Algorithm::Oracle}) {
        if (to_string(a) == s) return a;
    }
    throw Error(Errc::ParseError, "unknown algorithm " + std::string(s));
}

struct Scenario {
    HardwareGraph graph;
    std::vector<ServiceSpec> services;
    RadioState radio;   // static signal strengths; used when there is no trace
    SignalModel signal;
    bool has_signal_model = false;
    std::optional<MobilityTrace> trace;
    SolverOptions options;
    double stress = 0.0; // background load fraction
};

/// Signal strengths with the trace robot at `where` and other robots at
/// their own positions.
inline RadioState radio_at(const Scenario& sc, std::size_t step, const std::optional<Position>& where,
                           Rng* shadow = nullptr) {
    if (!sc.has_signal_model) return sc.radio;
    RadioState r;
    r.noise = sc.radio.noise;
    const auto& g = sc.graph;
    for (const auto robot : g.nodes_of(NodeKind::Robot)) {
        std::optional<Position> pos = g.node(robot).position;
        if (sc.trace && sc.trace->robot == robot && where) pos = where;
        for (const auto poa : g.poas_of(robot)) {
            double sigma = 0.0;
            if (sc.signal.mode == SignalModel::Mode::Table) {
                if (sc.signal.table.empty()) throw Error(Errc::ScenarioInvalid, "signal table is empty");
                const auto& row = sc.signal.table[std::min(step, sc.signal.table.size() - 1)];
                const auto it = row.find(poa);
                sigma = it == row.end() ? 0.0 : it->second;
            } else {
                const auto& pp = g.node(poa).position;
                if (!pos || !pp) throw Error(Errc::ScenarioInvalid, "path loss needs robot and PoA positions");
                sigma = sc.signal.path_loss(poa, distance(*pos, *pp));
                if (shadow && sc.signal.shadowing_db > 0.0) {
                    // Box-Muller on the portable uniform source.
                    const double u1 = std::max(shadow->uniform(), 1e-300);
                    const double u2 = shadow->uniform();
                    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
                    sigma *= std::pow(10.0, sc.signal.shadowing_db * z / 10.0);
                }
            }
            r.sigma[{robot, poa}] = sigma;
        }
    }
    return r;
}

/// Radio state at the start of the scenario.
inline RadioState initial_radio(const Scenario& sc) {
    if (!sc.has_signal_model) return sc.radio;
    std::optional<Position> where;
    if (sc.trace) where = sc.trace->position_at(0.0);
    return radio_at(sc, 0, where);
}

inline Embedding solve(Algorithm algo, const HardwareGraph& g, const std::vector<ServiceSpec>& services,
                       const RadioState& radio, const SolverOptions& opts = {}) {
    switch (algo) {
    case Algorithm::Dlmd: return place_services(g, services, radio, opts);
    case Algorithm::LatencyAgnostic: return latency_agnostic_solve(g, services, radio, opts);
    case Algorithm::RadioAgnostic: return radio_agnostic_solve(g, services, radio, opts);
    case Algorithm::Oracle: return optimal_solve(g, services, radio).embedding;
    }
    throw Error(Errc::DomainError, "unknown algorithm");
}

struct StepRecord {
    double t = 0.0;
    bool solved = false;
    std::optional<NodeId> attachment; // of the trace robot (or first robot)
    std::map<VfId, NodeId> placements;
    double delay = 0.0;     // ms, summed over services
    double d_net = 0.0;     // ms
    double d_pro = 0.0;     // ms
    double d_wireless = 0.0; // ms share of d_net on robot-PoA hops
    double objective = 0.0;
    double snr_db = 0.0;
    double capacity = 0.0;  // Mbps of the attached robot-PoA link
    double bandwidth = 0.0; // Mbps carried over it
    double edge_usage = 0.0;
    std::vector<Violation> violations;
    std::string error;      // solver failure, if any
    bool feasible = false;
    bool connected = false;
    bool deadline_met = false;
    double runtime_ms = 0.0;
};

struct EpisodeMetrics {
    Algorithm algorithm = Algorithm::Dlmd;
    std::vector<StepRecord> steps;
    std::size_t migrations = 0;
    std::size_t handovers = 0;
    std::size_t migrations_needed = 0;
    std::size_t migrations_succeeded = 0;

    [[nodiscard]] double rate(bool StepRecord::*flag) const {
        if (steps.empty()) return 0.0;
        double k = 0.0;
        for (const auto& s : steps) k += (s.*flag) ? 1.0 : 0.0;
        return k / static_cast<double>(steps.size());
    }
    [[nodiscard]] double deadline_rate() const { return rate(&StepRecord::deadline_met); }
    [[nodiscard]] double connectivity_rate() const { return rate(&StepRecord::connected); }
    [[nodiscard]] double feasibility_rate() const { return rate(&StepRecord::feasible); }
    [[nodiscard]] double migration_success_rate() const {
        return migrations_needed == 0 ? 1.0
                                      : static_cast<double>(migrations_succeeded) / static_cast<double>(migrations_needed);
    }
    [[nodiscard]] double mean_edge_usage() const {
        double sum = 0.0;
        std::size_t k = 0;
        for (const auto& s : steps) {
            if (!s.solved) continue;
            sum += s.edge_usage;
            ++k;
        }
        return k == 0 ? 0.0 : sum / static_cast<double>(k);
    }
    [[nodiscard]] std::vector<double> runtimes() const {
        std::vector<double> out;
        for (const auto& s : steps) out.push_back(s.runtime_ms);
        return out;
    }
};

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

namespace detail {

inline bool radio_violation(ViolationKind k) {
    return k == ViolationKind::WirelessCapacity || k == ViolationKind::SteerIfAttached ||
           k == ViolationKind::Attachment;
}

inline double first_demand(const std::vector<ServiceSpec>& services, NodeId robot, const HardwareGraph& g) {
    double d = 0.0;
    for (const auto& s : services) {
        if (robot_of(s, g) == robot) d = std::max(d, first_vl_demand(s));
    }
    return d;
}

} // namespace detail

/// One solve plus audit at a fixed radio state.
inline StepRecord evaluate_step(const Scenario& sc, const HardwareGraph& solved_on, Algorithm algo,
                                const RadioState& radio, NodeId robot, std::optional<Embedding>& out) {
    StepRecord rec;
    out.reset();
    const auto start = std::chrono::steady_clock::now();
    try {
        out = solve(algo, solved_on, sc.services, radio, sc.options);
    } catch (const Error& e) {
        rec.error = std::string(to_string(e.code()));
    }
    rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (!out) {
        // Coverage alone decides connectivity when nothing was placed.
        try {
            prune_poas(solved_on, robot, detail::first_demand(sc.services, robot, solved_on), radio);
            rec.connected = true;
        } catch (const Error&) {
            rec.connected = false;
        }
        return rec;
    }

    const Embedding& e = *out;
    rec.solved = true;
    rec.placements = e.placements;
    rec.violations = check_embedding(solved_on, sc.services, e, radio);
    rec.feasible = rec.violations.empty();
    rec.connected = std::none_of(rec.violations.begin(), rec.violations.end(),
                                 [](const Violation& v) { return detail::radio_violation(v.kind); });
    bool deadline_ok = true;
    for (const auto& s : sc.services) {
        const auto rep = delay_report(solved_on, s, e);
        rec.delay += rep.total;
        rec.d_net += rep.network;
        rec.d_pro += rep.processing_total();
        rec.d_wireless += rep.wireless;
        deadline_ok = deadline_ok && rep.total <= s.deadline + kTolerance;
    }
    rec.deadline_met = rec.connected && deadline_ok &&
                       std::none_of(rec.violations.begin(), rec.violations.end(),
                                    [](const Violation& v) { return v.kind == ViolationKind::Stability; });
    rec.objective = objective(solved_on, e);
    rec.edge_usage = edge_usage(sc.graph, sc.services, e);
    if (const auto it = e.attachment.find(robot); it != e.attachment.end()) {
        rec.attachment = it->second;
        const double sigma = radio.signal(robot, it->second);
        rec.snr_db = sigma > 0.0 ? 10.0 * std::log10(sigma / radio.noise) : -std::numeric_limits<double>::infinity();
        rec.capacity = channel_capacity(solved_on, radio, robot, it->second);
        const auto li = *solved_on.find_link(robot, it->second);
        const auto load = detail::link_load(solved_on, sc.services, e);
        if (const auto l = load.find(li); l != load.end()) rec.bandwidth = l->second;
    }
    return rec;
}

/// Re-solves at every trace step. `seed` drives shadowing only.
inline EpisodeMetrics run_episode(const Scenario& sc, Algorithm algo, std::uint64_t seed = 0) {
    if (!sc.trace) throw Error(Errc::ScenarioInvalid, "scenario has no trace");
    sc.trace->validate();
    if (!sc.graph.contains(sc.trace->robot) || sc.graph.node(sc.trace->robot).kind != NodeKind::Robot) {
        throw Error(Errc::ScenarioInvalid, "trace robot is not a robot");
    }
    if (!(sc.stress >= 0.0 && sc.stress <= 1.0)) throw Error(Errc::ScenarioInvalid, "stress must lie in [0,1]");

    const HardwareGraph solved_on = sc.stress > 0.0 ? sc.graph.with_stress(sc.stress) : sc.graph;
    const NodeId robot = sc.trace->robot;
    Rng shadow(seed);

    EpisodeMetrics m;
    m.algorithm = algo;
    std::optional<Embedding> previous;
    const auto times = sc.trace->times();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const RadioState radio = radio_at(sc, k, sc.trace->position_at(times[k]), &shadow);
        std::optional<Embedding> current;
        auto rec = evaluate_step(sc, solved_on, algo, radio, robot, current);
        rec.t = times[k];

        if (previous) {
            const bool needed = !check_embedding(solved_on, sc.services, *previous, radio).empty();
            if (needed) {
                ++m.migrations_needed;
                if (rec.feasible) ++m.migrations_succeeded;
            }
            if (current) {
                if (current->placements != previous->placements) ++m.migrations;
                if (current->attachment != previous->attachment) ++m.handovers;
            }
        }
        if (current) previous = std::move(current);
        m.steps.push_back(std::move(rec));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Background-load sweep

struct SweepSize {
    std::size_t n = 48;
    double p = 0.2;
};

struct StressConfig {
    std::vector<SweepSize> sizes{{48, minimal_feasible_p(48)}, {128, minimal_feasible_p(128)}};
    std::vector<double> levels{0.0, 0.2, 0.4, 0.6, 0.8};
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    std::size_t steps_per_leg = 5;
    double deadline = 15.0;      // ms
    double vl_demand = 50.0;     // Mbps
    double vf_compute = 2.0;     // CPU units per offloaded VF
    double reference_power = 5e5;
    double exponent = 3.0;
    Algorithm algorithm = Algorithm::Dlmd;
};

struct Stat {
    double mean = 0.0;
    double ci90 = 0.0; // half width, normal approximation

    bool operator==(const Stat&) const = default;
};

inline Stat summarize(const std::vector<double>& xs) {
    Stat s;
    if (xs.empty()) return s;
    for (const auto x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return s;
    double ss = 0.0;
    for (const auto x : xs) ss += (x - s.mean) * (x - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    s.ci90 = 1.6448536269514722 * sd / std::sqrt(static_cast<double>(xs.size()));
    return s;
}

struct StressRow {
    Algorithm algorithm = Algorithm::Dlmd;
    std::size_t n = 0;
    double p = 0.0;
    double stress = 0.0;
    std::size_t trials = 0;
    Stat delay;             // ms, mean over solved steps of a trial
    Stat deadline_rate;
    Stat feasibility_rate;
    Stat edge_usage;
    Stat migration_success;
    double runtime_median_ms = 0.0;
    std::vector<double> runtimes_ms; // every solve at this level
};

/// A robot driver pinned on the robot followed by three offloadable VFs.
inline ServiceSpec stress_service(NodeId robot, const StressConfig& cfg) {
    ServiceSpec s;
    s.id = ServiceId{0};
    s.name = "chain";
    s.deadline = cfg.deadline;
    s.vfs.push_back({VfId{0}, "v1", 1.0, robot});
    for (std::uint32_t i = 1; i <= 3; ++i) {
        s.vfs.push_back({VfId{i}, "v" + std::to_string(i + 1), cfg.vf_compute, std::nullopt});
        s.vls.push_back({VfId{i - 1}, VfId{i}, cfg.vl_demand});
    }
    return s;
}

/// Visits the PoAs in id order, `steps_per_leg` steps between neighbours.
inline MobilityTrace poa_tour(const HardwareGraph& g, NodeId robot, std::size_t steps_per_leg) {
    MobilityTrace tr;
    tr.robot = robot;
    tr.step = 1.0;
    const auto poas = g.poas_of(robot);
    for (std::size_t i = 0; i < poas.size(); ++i) {
        const auto& p = *g.node(poas[i]).position;
        tr.waypoints.push_back({static_cast<double>(i * steps_per_leg), p.x, p.y});
    }
    tr.duration = tr.waypoints.back().t + 1.0;
    return tr;
}

/// The sweep's service, path-loss radio and PoA tour on a generated graph.
inline Scenario stress_scenario(HardwareGraph g, const StressConfig& cfg) {
    Scenario sc;
    sc.graph = std::move(g);
    const NodeId robot = sc.graph.nodes_of(NodeKind::Robot).front();
    sc.services = {stress_service(robot, cfg)};
    sc.has_signal_model = true;
    sc.signal.mode = SignalModel::Mode::PathLoss;
    sc.signal.reference_power = cfg.reference_power;
    sc.signal.exponent = cfg.exponent;
    sc.radio.noise = 1.0;
    sc.trace = poa_tour(sc.graph, robot, cfg.steps_per_leg);
    return sc;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finaliser
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per (size, level) aggregates. Every level of a trial reuses the same
/// topology so differences come from the load alone.
inline std::vector<StressRow> stress_sweep(const StressConfig& cfg, const TopologyParams& base = {}) {
    for (const auto l : cfg.levels) {
        if (!(l >= 0.0 && l <= 1.0)) throw Error(Errc::DomainError, "stress levels must lie in [0,1]");
    }
    if (cfg.trials == 0) throw Error(Errc::DomainError, "at least one trial is required");

    std::vector<StressRow> rows;
    for (const auto& size : cfg.sizes) {
        std::vector<StressRow> level_rows(cfg.levels.size());
        std::vector<std::vector<double>> delay(cfg.levels.size()), deadline(cfg.levels.size()),
            feasible(cfg.levels.size()), usage(cfg.levels.size()), migration(cfg.levels.size());

        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            TopologyParams prm = base;
            prm.n = size.n;
            prm.p = size.p;
            prm.seed = mix_seed(cfg.seed, size.n * 1000003ULL + trial);
            Scenario sc = stress_scenario(generate(prm), cfg);

            for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
                sc.stress = cfg.levels[li];
                const auto m = run_episode(sc, cfg.algorithm, prm.seed);
                double dsum = 0.0;
                std::size_t dk = 0;
                for (const auto& s : m.steps) {
                    if (!s.solved) continue;
                    dsum += s.delay;
                    ++dk;
                }
                if (dk > 0) delay[li].push_back(dsum / static_cast<double>(dk));
                deadline[li].push_back(m.deadline_rate());
                feasible[li].push_back(m.feasibility_rate());
                usage[li].push_back(m.mean_edge_usage());
                migration[li].push_back(m.migration_success_rate());
                const auto rt = m.runtimes();
                level_rows[li].runtimes_ms.insert(level_rows[li].runtimes_ms.end(), rt.begin(), rt.end());
            }
        }
        for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
            auto& r = level_rows[li];
            r.algorithm = cfg.algorithm;
            r.n = size.n;
            r.p = size.p;
            r.stress = cfg.levels[li];
            r.trials = cfg.trials;
            r.delay = summarize(delay[li]);
            r.deadline_rate = summarize(deadline[li]);
            r.feasibility_rate = summarize(feasible[li]);
            r.edge_usage = summarize(usage[li]);
            r.migration_success = summarize(migration[li]);
            r.runtime_median_ms = median(r.runtimes_ms);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

} // namespace vfo

#endif // VFO_SIM_HPP
