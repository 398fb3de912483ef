/**
 * @file scenario_io.hpp
 * @brief JSON scenario files and solution documents.
 *
 * Scenario layout (units in the key names where they matter):
 *
 *   version   1
 *   costs     {cloud, far_edge, near_edge}  default kappa for servers without "cost"
 *   options   {alpha, stress}
 *   nodes     [{id, name, kind, tier?, compute, cost?, rate, position?: {x, y}}]
 *   links     [{a, b, bandwidth_mbps, delay_ms, queuing_ms, drop}]
 *   services  [{id, name, deadline_ms, vfs: [{id, name, compute, pin?}],
 *               vls: [{from, to, demand_mbps}]}]
 *   radio     {noise, sigma: [{robot, poa, value}],
 *              model?: {type: "path_loss", reference_power, exponent,
 *                       reference_distance, shadowing_db, powers: [{poa, value}]}
 *                    | {type: "table", rows: [[{poa, value}]]}}
 *   trace?    {robot, step_s, duration_s, waypoints: [{t, x, y}]}
 *
 * deadline_ms may be the string "inf".
 */

#ifndef VFO_SCENARIO_IO_HPP
#define VFO_SCENARIO_IO_HPP

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "vfo/feasibility.hpp"
#include "vfo/model.hpp"
#include "vfo/sim.hpp"

namespace vfo {

using Json = nlohmann::ordered_json;

inline constexpr int kScenarioVersion = 1;

namespace detail {

inline NodeKind parse_kind(const std::string& s) {
    for (const auto k : {NodeKind::Robot, NodeKind::PoA, NodeKind::Switch, NodeKind::Server}) {
        if (to_string(k) == s) return k;
    }
    throw Error(Errc::ParseError, "unknown node kind " + s);
}

inline Tier parse_tier(const std::string& s) {
    for (const auto t : {Tier::NearEdge, Tier::FarEdge, Tier::Cloud}) {
        if (to_string(t) == s) return t;
    }
    throw Error(Errc::ParseError, "unknown tier " + s);
}

inline double read_deadline(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw Error(Errc::ParseError, "deadline_ms must be a number or \"inf\"");
    }
    return j.get<double>();
}

inline Json write_deadline(double d) { return std::isinf(d) ? Json("inf") : Json(d); }

inline NodeId node_id(const Json& j) { return NodeId{j.get<std::uint32_t>()}; }

} // namespace detail

inline Scenario scenario_from_json(const Json& j) {
    try {
        if (j.value("version", kScenarioVersion) != kScenarioVersion) {
            throw Error(Errc::ParseError, "unsupported scenario version");
        }
        CostTable costs;
        if (j.contains("costs")) {
            const auto& c = j.at("costs");
            costs.cloud = c.value("cloud", costs.cloud);
            costs.far_edge = c.value("far_edge", costs.far_edge);
            costs.near_edge = c.value("near_edge", costs.near_edge);
        }

        std::vector<Node> nodes;
        for (const auto& jn : j.at("nodes")) {
            Node n;
            n.id = detail::node_id(jn.at("id"));
            n.name = jn.value("name", std::to_string(n.id.value));
            n.kind = detail::parse_kind(jn.at("kind").get<std::string>());
            if (jn.contains("tier")) n.tier = detail::parse_tier(jn.at("tier").get<std::string>());
            n.compute = jn.value("compute", 0.0);
            n.rate = jn.value("rate", 0.0);
            n.cost = jn.contains("cost") ? jn.at("cost").get<double>() : (n.tier ? costs(*n.tier) : 0.0);
            if (jn.contains("position")) n.position = Position{jn.at("position").at("x"), jn.at("position").at("y")};
            nodes.push_back(std::move(n));
        }
        std::vector<Link> links;
        for (const auto& jl : j.at("links")) {
            Link l;
            l.a = detail::node_id(jl.at("a"));
            l.b = detail::node_id(jl.at("b"));
            l.bandwidth = jl.at("bandwidth_mbps").get<double>();
            l.delay = jl.value("delay_ms", 0.0);
            l.queuing = jl.value("queuing_ms", 0.0);
            l.drop = jl.value("drop", 0.0);
            links.push_back(l);
        }

        Scenario sc;
        sc.graph = build_graph(std::move(nodes), std::move(links));

        for (const auto& js : j.value("services", Json::array())) {
            ServiceSpec s;
            s.id = ServiceId{js.at("id").get<std::uint32_t>()};
            s.name = js.value("name", std::to_string(s.id.value));
            s.deadline = detail::read_deadline(js.at("deadline_ms"));
            for (const auto& jf : js.at("vfs")) {
                VirtualFunction f;
                f.id = VfId{jf.at("id").get<std::uint32_t>()};
                f.name = jf.value("name", std::to_string(f.id.value));
                f.compute = jf.value("compute", 0.0);
                if (jf.contains("pin") && !jf.at("pin").is_null()) f.pin = detail::node_id(jf.at("pin"));
                s.vfs.push_back(std::move(f));
            }
            for (const auto& jv : js.value("vls", Json::array())) {
                s.vls.push_back({VfId{jv.at("from").get<std::uint32_t>()}, VfId{jv.at("to").get<std::uint32_t>()},
                                 jv.value("demand_mbps", 0.0)});
            }
            sc.services.push_back(std::move(s));
        }
        validate_services(sc.graph, sc.services);

        if (j.contains("options")) {
            sc.options.alpha = j.at("options").value("alpha", 1.0);
            sc.stress = j.at("options").value("stress", 0.0);
        }

        if (j.contains("radio")) {
            const auto& jr = j.at("radio");
            sc.radio.noise = jr.value("noise", 1.0);
            if (!(sc.radio.noise > 0.0)) throw Error(Errc::InvalidAttribute, "noise must be > 0");
            for (const auto& js : jr.value("sigma", Json::array())) {
                const double v = js.at("value").get<double>();
                if (v < 0.0) throw Error(Errc::InvalidAttribute, "sigma must be >= 0");
                sc.radio.sigma[{detail::node_id(js.at("robot")), detail::node_id(js.at("poa"))}] = v;
            }
            if (jr.contains("model")) {
                const auto& jm = jr.at("model");
                sc.has_signal_model = true;
                const auto type = jm.at("type").get<std::string>();
                if (type == "path_loss") {
                    sc.signal.mode = SignalModel::Mode::PathLoss;
                    sc.signal.reference_power = jm.value("reference_power", 1.0);
                    sc.signal.exponent = jm.value("exponent", 3.0);
                    sc.signal.reference_distance = jm.value("reference_distance", 1.0);
                    sc.signal.shadowing_db = jm.value("shadowing_db", 0.0);
                    for (const auto& jp : jm.value("powers", Json::array())) {
                        sc.signal.poa_power[detail::node_id(jp.at("poa"))] = jp.at("value").get<double>();
                    }
                    if (!(sc.signal.exponent > 0.0) || !(sc.signal.reference_distance > 0.0)) {
                        throw Error(Errc::InvalidAttribute, "path loss exponent and reference distance must be > 0");
                    }
                } else if (type == "table") {
                    sc.signal.mode = SignalModel::Mode::Table;
                    for (const auto& row : jm.at("rows")) {
                        std::map<NodeId, double> r;
                        for (const auto& e : row) r[detail::node_id(e.at("poa"))] = e.at("value").get<double>();
                        sc.signal.table.push_back(std::move(r));
                    }
                } else {
                    throw Error(Errc::ParseError, "unknown signal model " + type);
                }
            }
        }

        if (j.contains("trace")) {
            const auto& jt = j.at("trace");
            MobilityTrace tr;
            tr.robot = detail::node_id(jt.at("robot"));
            tr.step = jt.value("step_s", 1.0);
            tr.duration = jt.at("duration_s").get<double>();
            for (const auto& w : jt.at("waypoints")) tr.waypoints.push_back({w.at("t"), w.at("x"), w.at("y")});
            tr.validate();
            sc.trace = std::move(tr);
        }
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
}

inline Json scenario_to_json(const Scenario& sc) {
    Json j;
    j["version"] = kScenarioVersion;
    j["options"] = {{"alpha", sc.options.alpha}, {"stress", sc.stress}};
    Json nodes = Json::array();
    for (const auto& n : sc.graph.nodes()) {
        Json jn;
        jn["id"] = n.id.value;
        jn["name"] = n.name;
        jn["kind"] = to_string(n.kind);
        if (n.tier) jn["tier"] = to_string(*n.tier);
        jn["compute"] = n.compute;
        jn["cost"] = n.cost;
        jn["rate"] = n.rate;
        if (n.position) jn["position"] = {{"x", n.position->x}, {"y", n.position->y}};
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    Json links = Json::array();
    for (const auto& l : sc.graph.links()) {
        links.push_back({{"a", l.a.value},
                         {"b", l.b.value},
                         {"bandwidth_mbps", l.bandwidth},
                         {"delay_ms", l.delay},
                         {"queuing_ms", l.queuing},
                         {"drop", l.drop}});
    }
    j["links"] = std::move(links);
    Json services = Json::array();
    for (const auto& s : sc.services) {
        Json js;
        js["id"] = s.id.value;
        js["name"] = s.name;
        js["deadline_ms"] = detail::write_deadline(s.deadline);
        Json vfs = Json::array();
        for (const auto& f : s.vfs) {
            Json jf{{"id", f.id.value}, {"name", f.name}, {"compute", f.compute}};
            if (f.pin) jf["pin"] = f.pin->value;
            vfs.push_back(std::move(jf));
        }
        js["vfs"] = std::move(vfs);
        Json vls = Json::array();
        for (const auto& l : s.vls) vls.push_back({{"from", l.from.value}, {"to", l.to.value}, {"demand_mbps", l.demand}});
        js["vls"] = std::move(vls);
        services.push_back(std::move(js));
    }
    j["services"] = std::move(services);

    Json radio;
    radio["noise"] = sc.radio.noise;
    Json sigma = Json::array();
    for (const auto& [key, v] : sc.radio.sigma) {
        sigma.push_back({{"robot", key.first.value}, {"poa", key.second.value}, {"value", v}});
    }
    radio["sigma"] = std::move(sigma);
    if (sc.has_signal_model) {
        Json m;
        if (sc.signal.mode == SignalModel::Mode::PathLoss) {
            m["type"] = "path_loss";
            m["reference_power"] = sc.signal.reference_power;
            m["exponent"] = sc.signal.exponent;
            m["reference_distance"] = sc.signal.reference_distance;
            m["shadowing_db"] = sc.signal.shadowing_db;
            Json powers = Json::array();
            for (const auto& [poa, v] : sc.signal.poa_power) powers.push_back({{"poa", poa.value}, {"value", v}});
            m["powers"] = std::move(powers);
        } else {
            m["type"] = "table";
            Json rows = Json::array();
            for (const auto& row : sc.signal.table) {
                Json r = Json::array();
                for (const auto& [poa, v] : row) r.push_back({{"poa", poa.value}, {"value", v}});
                rows.push_back(std::move(r));
            }
            m["rows"] = std::move(rows);
        }
        radio["model"] = std::move(m);
    }
    j["radio"] = std::move(radio);

    if (sc.trace) {
        Json wps = Json::array();
        for (const auto& w : sc.trace->waypoints) wps.push_back({{"t", w.t}, {"x", w.x}, {"y", w.y}});
        j["trace"] = {{"robot", sc.trace->robot.value},
                      {"step_s", sc.trace->step},
                      {"duration_s", sc.trace->duration},
                      {"waypoints", std::move(wps)}};
    }
    return j;
}

inline Scenario parse_scenario(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
    return scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

inline Json embedding_to_json(const Embedding& e) {
    Json placements = Json::array();
    for (const auto& [vf, n] : e.placements) placements.push_back({{"vf", vf.value}, {"node", n.value}});
    Json routes = Json::array();
    for (const auto& [key, r] : e.routes) {
        Json path = Json::array();
        for (const auto n : r) path.push_back(n.value);
        routes.push_back({{"from", key.from.value}, {"to", key.to.value}, {"path", std::move(path)}});
    }
    Json attachment = Json::array();
    for (const auto& [robot, poa] : e.attachment) attachment.push_back({{"robot", robot.value}, {"poa", poa.value}});
    return {{"placements", std::move(placements)}, {"routes", std::move(routes)}, {"attachment", std::move(attachment)}};
}

inline Embedding embedding_from_json(const Json& j) {
    try {
        Embedding e;
        for (const auto& p : j.at("placements")) e.placements[VfId{p.at("vf").get<std::uint32_t>()}] = detail::node_id(p.at("node"));
        for (const auto& r : j.at("routes")) {
            Route path;
            for (const auto& n : r.at("path")) path.push_back(detail::node_id(n));
            e.routes[{VfId{r.at("from").get<std::uint32_t>()}, VfId{r.at("to").get<std::uint32_t>()}}] = std::move(path);
        }
        for (const auto& a : j.at("attachment")) e.attachment[detail::node_id(a.at("robot"))] = detail::node_id(a.at("poa"));
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Errc::ParseError, ex.what());
    }
}

inline Json violation_to_json(const Violation& v) {
    return {{"kind", to_string(v.kind)}, {"location", to_string(v.location)}, {"measured", v.measured}, {"bound", v.bound}};
}

/// Solution document written by `vfo solve` and `vfo oracle`.
inline Json solution_to_json(const Scenario& sc, const HardwareGraph& g, const RadioState& radio,
                             std::string_view algorithm, const Embedding& e) {
    const auto violations = check_embedding(g, sc.services, e, radio);
    Json delays = Json::array();
    for (const auto& s : sc.services) {
        const auto rep = delay_report(g, s, e);
        Json pro = Json::array();
        for (const auto& [vf, d] : rep.processing) pro.push_back({{"vf", vf.value}, {"ms", d}});
        delays.push_back({{"service", s.id.value},
                          {"total_ms", rep.total},
                          {"network_ms", rep.network},
                          {"processing_ms", rep.processing_total()},
                          {"wireless_ms", rep.wireless},
                          {"deadline_ms", detail::write_deadline(rep.deadline)},
                          {"processing", std::move(pro)}});
    }
    Json vs = Json::array();
    for (const auto& v : violations) vs.push_back(violation_to_json(v));
    return {{"algorithm", algorithm},
            {"feasible", violations.empty()},
            {"objective", objective(g, e)},
            {"delay", std::move(delays)},
            {"violations", std::move(vs)},
            {"embedding", embedding_to_json(e)}};
}

} // namespace vfo

#endif // VFO_SCENARIO_IO_HPP
