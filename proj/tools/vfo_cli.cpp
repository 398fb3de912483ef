// vfo: solve, simulate and sweep robotic VF embeddings from the command line.
//
// Exit codes: 0 success (and feasible, for solve/oracle), 2 no feasible
// embedding, 1 any other error. VFO_LOG=error|warn|info|debug sets stderr
// verbosity (default warn).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vfo/oracle.hpp"
#include "vfo/report.hpp"
#include "vfo/scenario_io.hpp"
#include "vfo/sim.hpp"
#include "vfo/topology.hpp"

namespace {

enum class Level { Error, Warn, Info, Debug };

Level log_level() {
    const char* env = std::getenv("VFO_LOG");
    const std::string v = env ? env : "";
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
}

void log(Level at, const std::string& msg) {
    static const Level threshold = log_level();
    if (at > threshold) return;
    static constexpr const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "vfo: " << names[static_cast<int>(at)] << ": " << msg << '\n';
}

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInfeasible = 2;

bool is_infeasibility(vfo::Errc c) {
    using vfo::Errc;
    return c == Errc::Infeasible || c == Errc::NoFeasiblePlacement || c == Errc::NoCoverage ||
           c == Errc::NoFeasibleCapacity;
}

/// Writes to `path`, or stdout for "" and "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw vfo::Error(vfo::Errc::ParseError, "cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

struct SolveArgs {
    std::string scenario;
    std::string algo = "dlmd";
    std::string out;
};

int run_solve(const SolveArgs& a) {
    const auto sc = vfo::load_scenario(a.scenario);
    const auto algo = vfo::parse_algorithm(a.algo);
    const auto g = sc.stress > 0.0 ? sc.graph.with_stress(sc.stress) : sc.graph;
    const auto radio = vfo::initial_radio(sc);
    Output out(a.out);
    try {
        const auto e = vfo::solve(algo, g, sc.services, radio, sc.options);
        auto doc = vfo::solution_to_json(sc, g, radio, a.algo, e);
        doc["reconstructed"] = vfo::is_reconstruction(algo);
        out.stream() << doc.dump(2) << '\n';
        log(Level::Info, std::string("objective ") + vfo::format_number(doc["objective"].get<double>()));
        return doc["feasible"].get<bool>() ? kOk : kInfeasible;
    } catch (const vfo::Error& e) {
        if (!is_infeasibility(e.code())) throw;
        out.stream() << vfo::Json{{"algorithm", a.algo}, {"feasible", false}, {"error", e.what()}}.dump(2) << '\n';
        log(Level::Warn, e.what());
        return kInfeasible;
    }
}

struct OracleArgs {
    std::string scenario;
    std::string out;
    double budget = 1e7;
    std::size_t k_paths = 3;
};

int run_oracle(const OracleArgs& a) {
    const auto sc = vfo::load_scenario(a.scenario);
    const auto g = sc.stress > 0.0 ? sc.graph.with_stress(sc.stress) : sc.graph;
    const auto radio = vfo::initial_radio(sc);
    Output out(a.out);
    try {
        const auto r = vfo::optimal_solve(g, sc.services, radio, {a.k_paths, a.budget});
        auto doc = vfo::solution_to_json(sc, g, radio, "oracle", r.embedding);
        doc["servers_used"] = r.servers_used;
        out.stream() << doc.dump(2) << '\n';
        return kOk;
    } catch (const vfo::Error& e) {
        if (!is_infeasibility(e.code())) throw;
        out.stream() << vfo::Json{{"algorithm", "oracle"}, {"feasible", false}, {"error", e.what()}}.dump(2) << '\n';
        return kInfeasible;
    }
}

struct SimulateArgs {
    std::string scenario;
    std::string algo = "dlmd";
    std::uint64_t seed = 0;
    std::string csv;
    std::string summary;
    bool timing = false;
};

int run_simulate(const SimulateArgs& a) {
    const auto sc = vfo::load_scenario(a.scenario);
    const auto algo = vfo::parse_algorithm(a.algo);
    const auto m = vfo::run_episode(sc, algo, a.seed);
    Output out(a.csv);
    vfo::write_episode_csv(out.stream(), sc, m, a.timing);
    if (!a.summary.empty()) {
        Output sum(a.summary);
        sum.stream() << vfo::episode_summary(m, a.timing).dump(2) << '\n';
    }
    log(Level::Info, std::to_string(m.steps.size()) + " steps, " + std::to_string(m.migrations) + " migrations, " +
                         std::to_string(m.handovers) + " handovers");
    return kOk;
}

struct StressArgs {
    std::vector<std::size_t> n{48, 128};
    std::vector<double> p;
    std::vector<double> levels{0.0, 0.2, 0.4, 0.6, 0.8};
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    std::string algo = "dlmd";
    std::string csv;
    bool timing = false;
};

int run_stress(const StressArgs& a) {
    if (!a.p.empty() && a.p.size() != a.n.size()) {
        throw vfo::Error(vfo::Errc::DomainError, "--p needs one value per --n");
    }
    vfo::StressConfig cfg;
    cfg.sizes.clear();
    for (std::size_t i = 0; i < a.n.size(); ++i) {
        cfg.sizes.push_back({a.n[i], a.p.empty() ? vfo::minimal_feasible_p(a.n[i]) : a.p[i]});
    }
    cfg.levels = a.levels;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.algorithm = vfo::parse_algorithm(a.algo);
    const auto rows = vfo::stress_sweep(cfg);
    Output out(a.csv);
    vfo::write_stress_csv(out.stream(), rows, a.timing);
    for (const auto& r : rows) {
        log(Level::Info, "n=" + std::to_string(r.n) + " stress=" + vfo::format_number(r.stress) +
                             " runtime median " + vfo::format_number(r.runtime_median_ms) + " ms");
    }
    return kOk;
}

struct GenArgs {
    std::size_t n = 48;
    double p = 0.0;
    std::uint64_t seed = 1;
    std::string sites;
    std::string out;
};

int run_gen(const GenArgs& a) {
    vfo::TopologyParams prm;
    prm.n = a.n;
    prm.p = a.p > 0.0 ? a.p : vfo::minimal_feasible_p(a.n);
    prm.seed = a.seed;
    if (!a.sites.empty()) {
        std::ifstream in(a.sites);
        if (!in) throw vfo::Error(vfo::Errc::ParseError, "cannot open " + a.sites);
        prm.sites = vfo::read_poa_sites(in);
    }
    const auto sc = vfo::stress_scenario(vfo::generate(prm), vfo::StressConfig{});
    Output out(a.out);
    out.stream() << vfo::scenario_to_json(sc).dump(2) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robotic VF embedding: DLMD, baselines, exhaustive optimum and experiments"};
    app.require_subcommand(1);
    const std::string algos = "dlmd, latency-agnostic, radio-agnostic, oracle";

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve one scenario and write the embedding as JSON");
    s->add_option("scenario", solve.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--algo", solve.algo, algos);
    s->add_option("-o,--out", solve.out, "Output file (default stdout)");

    SimulateArgs sim;
    auto* m = app.add_subcommand("simulate", "Run an episode along the scenario trace");
    m->add_option("scenario", sim.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    m->add_option("--algo", sim.algo, algos);
    m->add_option("--seed", sim.seed, "Seed for signal shadowing");
    m->add_option("--csv", sim.csv, "Per-step CSV (default stdout)");
    m->add_option("--summary", sim.summary, "Aggregate JSON");
    m->add_flag("--timing", sim.timing, "Add wall-clock solver runtime columns");

    StressArgs stress;
    auto* st = app.add_subcommand("stress", "Background-load sweep over generated topologies");
    st->add_option("--n", stress.n, "Core node counts");
    st->add_option("--p", stress.p, "Link probabilities, one per --n (default: smallest feasible)");
    st->add_option("--levels", stress.levels, "Stress fractions in [0,1]")->check(CLI::Range(0.0, 1.0));
    st->add_option("--trials", stress.trials, "Topologies per size")->check(CLI::PositiveNumber);
    st->add_option("--seed", stress.seed, "Base seed");
    st->add_option("--algo", stress.algo, algos);
    st->add_option("--csv", stress.csv, "Aggregate CSV (default stdout)");
    st->add_flag("--timing", stress.timing, "Add the median solver runtime column");

    OracleArgs oracle;
    auto* o = app.add_subcommand("oracle", "Exhaustive optimum for a small scenario");
    o->add_option("scenario", oracle.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    o->add_option("-o,--out", oracle.out, "Output file (default stdout)");
    o->add_option("--budget", oracle.budget, "Maximum enumeration size");
    o->add_option("--k", oracle.k_paths, "Shortest paths tried per virtual link");

    GenArgs gen;
    auto* t = app.add_subcommand("gen-topology", "Generate an Erdos-Renyi scenario");
    t->add_option("--n", gen.n, "Core node count");
    t->add_option("--p", gen.p, "Link probability (default: smallest feasible)");
    t->add_option("--seed", gen.seed, "Seed");
    t->add_option("--sites", gen.sites, "PoA site CSV (poa_id,lat,lon)")->check(CLI::ExistingFile);
    t->add_option("-o,--out", gen.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (*s) return run_solve(solve);
        if (*m) return run_simulate(sim);
        if (*st) return run_stress(stress);
        if (*o) return run_oracle(oracle);
        if (*t) return run_gen(gen);
    } catch (const vfo::Error& e) {
        log(Level::Error, e.what());
        return kFailure;
    } catch (const std::exception& e) {
        log(Level::Error, e.what());
        return kFailure;
    }
    return kFailure;
}
