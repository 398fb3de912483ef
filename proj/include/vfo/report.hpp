/**
 * @file report.hpp
 * @brief CSV and JSON metric files.
 *
 * Numbers are written with std::to_chars (shortest round-trip form) so the
 * same run produces the same bytes. Wall-clock columns are only emitted
 * when timing is requested.
 *
 * Episode CSV, one row per step:
 *   t_s, algorithm, reconstructed, attachment, placements, delay_ms, d_net_ms,
 *   d_pro_ms, d_wireless_ms, objective, snr_db, capacity_mbps, bandwidth_mbps,
 *   edge_usage, violations, error, feasible, connected, deadline_met
 *   [, runtime_ms]
 * Cells that do not apply to a step (nothing was placed) are empty.
 * reconstructed is 1 for the two baselines.
 *
 * Stress CSV, one row per (n, stress):
 *   algorithm, reconstructed, n, p, stress, trials, delay_ms_mean, delay_ms_ci90, deadline_rate_mean,
 *   deadline_rate_ci90, feasibility_rate_mean, feasibility_rate_ci90,
 *   edge_usage_mean, edge_usage_ci90, migration_success_mean,
 *   migration_success_ci90 [, runtime_ms_median]
 */

#ifndef VFO_REPORT_HPP
#define VFO_REPORT_HPP

#include <array>
#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include "vfo/scenario_io.hpp"
#include "vfo/sim.hpp"

namespace vfo {

inline constexpr int kMetricsSchemaVersion = 1;

inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

inline std::string format_number(std::size_t v) { return std::to_string(v); }

namespace detail {

inline void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

inline std::string node_name(const HardwareGraph& g, NodeId n) {
    return g.contains(n) ? g.node(n).name : std::to_string(n.value);
}

inline std::string vf_name(const std::vector<ServiceSpec>& services, VfId v) {
    for (const auto& s : services) {
        if (const auto* f = s.find_vf(v)) return f->name;
    }
    return std::to_string(v.value);
}

} // namespace detail

inline std::vector<std::string> episode_header(bool timing) {
    std::vector<std::string> h{"t_s",           "algorithm",      "reconstructed", "attachment", "placements",
                               "delay_ms",      "d_net_ms",       "d_pro_ms",      "d_wireless_ms", "objective",
                               "snr_db",        "capacity_mbps",  "bandwidth_mbps", "edge_usage", "violations",
                               "error",         "feasible",       "connected",     "deadline_met"};
    if (timing) h.push_back("runtime_ms");
    return h;
}

inline void write_episode_csv(std::ostream& out, const Scenario& sc, const EpisodeMetrics& m, bool timing = false) {
    detail::write_row(out, episode_header(timing));
    const auto& g = sc.graph;
    for (const auto& s : m.steps) {
        std::string placements;
        for (const auto& [vf, n] : s.placements) {
            if (!placements.empty()) placements += ';';
            placements += detail::vf_name(sc.services, vf) + "@" + detail::node_name(g, n);
        }
        std::string violations;
        for (const auto& v : s.violations) {
            if (!violations.empty()) violations += ';';
            violations += std::string(to_string(v.kind)) + "@" + to_string(v.location);
        }
        auto num = [&](double v) { return s.solved ? format_number(v) : std::string(); };
        std::vector<std::string> row{format_number(s.t),
                                     std::string(to_string(m.algorithm)),
                                     is_reconstruction(m.algorithm) ? "1" : "0",
                                     s.attachment ? detail::node_name(g, *s.attachment) : std::string(),
                                     placements,
                                     num(s.delay),
                                     num(s.d_net),
                                     num(s.d_pro),
                                     num(s.d_wireless),
                                     num(s.objective),
                                     s.attachment ? format_number(s.snr_db) : std::string(),
                                     s.attachment ? format_number(s.capacity) : std::string(),
                                     s.attachment ? format_number(s.bandwidth) : std::string(),
                                     num(s.edge_usage),
                                     violations,
                                     s.error,
                                     s.feasible ? "1" : "0",
                                     s.connected ? "1" : "0",
                                     s.deadline_met ? "1" : "0"};
        if (timing) row.push_back(format_number(s.runtime_ms));
        detail::write_row(out, row);
    }
}

inline Json episode_summary(const EpisodeMetrics& m, bool timing = false) {
    double max_delay = 0.0;
    for (const auto& s : m.steps) {
        if (s.solved) max_delay = std::max(max_delay, s.delay);
    }
    Json j{{"schema_version", kMetricsSchemaVersion},
           {"algorithm", to_string(m.algorithm)},
           {"reconstructed", is_reconstruction(m.algorithm)},
           {"steps", m.steps.size()},
           {"migrations", m.migrations},
           {"handovers", m.handovers},
           {"migrations_needed", m.migrations_needed},
           {"migrations_succeeded", m.migrations_succeeded},
           {"migration_success_rate", m.migration_success_rate()},
           {"deadline_rate", m.deadline_rate()},
           {"connectivity_rate", m.connectivity_rate()},
           {"feasibility_rate", m.feasibility_rate()},
           {"edge_usage_mean", m.mean_edge_usage()},
           {"max_delay_ms", max_delay}};
    if (timing) j["runtime_ms_median"] = median(m.runtimes());
    return j;
}

inline std::vector<std::string> stress_header(bool timing) {
    std::vector<std::string> h{"algorithm",
                               "reconstructed",
                               "n",
                               "p",
                               "stress",
                               "trials",
                               "delay_ms_mean",
                               "delay_ms_ci90",
                               "deadline_rate_mean",
                               "deadline_rate_ci90",
                               "feasibility_rate_mean",
                               "feasibility_rate_ci90",
                               "edge_usage_mean",
                               "edge_usage_ci90",
                               "migration_success_mean",
                               "migration_success_ci90"};
    if (timing) h.push_back("runtime_ms_median");
    return h;
}

inline void write_stress_csv(std::ostream& out, const std::vector<StressRow>& rows, bool timing = false) {
    detail::write_row(out, stress_header(timing));
    for (const auto& r : rows) {
        std::vector<std::string> row{std::string(to_string(r.algorithm)),
                                     is_reconstruction(r.algorithm) ? "1" : "0",
                                     format_number(r.n),
                                     format_number(r.p),
                                     format_number(r.stress),
                                     format_number(r.trials),
                                     format_number(r.delay.mean),
                                     format_number(r.delay.ci90),
                                     format_number(r.deadline_rate.mean),
                                     format_number(r.deadline_rate.ci90),
                                     format_number(r.feasibility_rate.mean),
                                     format_number(r.feasibility_rate.ci90),
                                     format_number(r.edge_usage.mean),
                                     format_number(r.edge_usage.ci90),
                                     format_number(r.migration_success.mean),
                                     format_number(r.migration_success.ci90)};
        if (timing) row.push_back(format_number(r.runtime_median_ms));
        detail::write_row(out, row);
    }
}

} // namespace vfo

#endif // VFO_REPORT_HPP
