/*
 * qwalk: command-line driver for the quantum-walk network toolkit.
 *
 * Subcommands: gen, walk, quantumness, communities, nmi, perturb.
 *
 * Conventions shared by every subcommand:
 *   - outputs are JSON (CSV where noted), doubles printed with 17 significant
 *     digits, so reruns with identical inputs produce byte-identical files;
 *   - files are written atomically (temp file + rename) and each -o output
 *     gets a "<name>.manifest.json" sidecar recording the command, resolved
 *     parameters, seeds and input digests;
 *   - when --seed is not given, the QWALK_SEED environment variable (if set)
 *     supplies the default seed, else 0;
 *   - exit codes: 0 success, 2 command-line parse error, 3 invalid input,
 *     4 numerical failure, 1 unexpected error.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "qwalk/community.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/generators.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/walk.hpp"
#include "json_writer.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace qwalk;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write file: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ValidationError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        throw ValidationError("cannot move " + tmp.string() + " to " + path + ": " +
                              ec.message());
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// "out.json" -> "out<suffix>.json"; a missing .json extension just appends.
std::string derived_path(const std::string& out, const std::string& suffix) {
    const std::string ext = ".json";
    if (out.size() > ext.size() &&
        out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
        return out.substr(0, out.size() - ext.size()) + suffix + ext;
    return out + suffix + ext;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    if (s.empty()) throw ValidationError(what + ": empty integer");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw ValidationError(what + ": not an unsigned integer: " + s);
    return v;
}

double parse_real(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(what + ": not a number: " + s);
    }
}

std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item, what));
    if (out.empty()) throw ValidationError(what + ": empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_real_list(s, what)) {
        const int i = int(v);
        if (double(i) != v) throw ValidationError(what + ": not an integer list: " + s);
        out.push_back(i);
    }
    return out;
}

// ---- run manifest -----------------------------------------------------------

struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::uint64_t> seeds;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::vector<std::string> outputs;
};

std::string manifest_json(const Manifest& m) {
    JsonWriter w;
    w.begin_object();
    w.key("command");
    w.value(m.command);
    w.key("version");
    w.value(kVersion);
    w.key("parameters");
    w.begin_object();
    for (const auto& [k, v] : m.params) {
        w.key(k);
        w.value(v);
    }
    w.end_object();
    w.key("seeds");
    w.begin_array(true);
    for (std::uint64_t s : m.seeds) w.value(static_cast<unsigned long long>(s));
    w.end_array();
    w.key("inputs");
    w.begin_array();
    for (const auto& [path, digest] : m.inputs) {
        w.begin_object();
        w.key("path");
        w.value(path);
        w.key("fnv1a64");
        w.value(digest);
        w.end_object();
    }
    w.end_array();
    w.key("outputs");
    w.begin_array(true);
    for (const auto& o : m.outputs) w.value(o);
    w.end_array();
    w.end_object();
    return w.str();
}

void write_manifest(const Manifest& m, const std::string& out_path) {
    write_file_atomic(derived_path(out_path, ".manifest"), manifest_json(m));
}

// ---- shared option plumbing ---------------------------------------------------

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    const char* env = std::getenv("QWALK_SEED");
    if (env == nullptr) return 0;
    return parse_u64(env, "QWALK_SEED");
}

GraphFormat detect_format(const std::string& path, const std::string& format) {
    if (format == "json") return GraphFormat::json;
    if (format == "edgelist") return GraphFormat::edgelist;
    if (format != "auto") throw ValidationError("unknown --format: " + format);
    const std::string ext = ".json";
    if (path.size() > ext.size() &&
        path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
        return GraphFormat::json;
    return GraphFormat::edgelist;
}

// Graph-or-Hamiltonian input shared by walk/communities/perturb.
struct HInput {
    std::string graph_path;
    std::string hamiltonian_path;
    std::string h_kind;  // per-command default
    std::string format = "auto";
    CLI::Option* h_kind_opt = nullptr;

    void add_to(CLI::App* cmd, const std::string& default_kind) {
        h_kind = default_kind;
        cmd->add_option("-g,--graph", graph_path, "input graph file");
        cmd->add_option("-H,--hamiltonian", hamiltonian_path,
                        "input Hamiltonian JSON file");
        h_kind_opt = cmd->add_option(
            "--h-kind", h_kind,
            "Hamiltonian built from a graph input: quantum | adjacency (default " +
                default_kind + ")");
        cmd->add_option("--format", format, "graph file format: auto | json | edgelist");
    }

    Hamiltonian load(Manifest& m) const {
        const bool has_g = !graph_path.empty();
        const bool has_h = !hamiltonian_path.empty();
        if (has_g == has_h)
            throw ValidationError("exactly one of --graph and --hamiltonian is required");
        if (has_h) {
            if (h_kind_opt != nullptr && h_kind_opt->count() > 0)
                throw ValidationError("--h-kind applies only to graph inputs");
            const std::string text = read_file(hamiltonian_path);
            m.inputs.emplace_back(hamiltonian_path, fnv1a64_hex(text));
            return parse_hamiltonian_json(text);
        }
        const Graph g = load_graph_logged(m);
        if (h_kind == "quantum") return quantum_generator(g);
        if (h_kind == "adjacency") return adjacency_hamiltonian(g);
        throw ValidationError("unknown --h-kind: " + h_kind);
    }

    Graph load_graph_logged(Manifest& m) const {
        const std::string text = read_file(graph_path);
        m.inputs.emplace_back(graph_path, fnv1a64_hex(text));
        if (detect_format(graph_path, format) == GraphFormat::json)
            return parse_graph_json(text);
        return parse_graph_edgelist(text);
    }
};

InitialState parse_initial(const std::string& s, Manifest& m) {
    if (s == "uniform") return InitialState::uniform();
    if (s.rfind("node:", 0) == 0) {
        const std::string idx = s.substr(5);
        const std::uint64_t node = parse_u64(idx, "--initial node index");
        return InitialState::localized(int(node));
    }
    if (s.rfind("file:", 0) == 0) {
        const std::string path = s.substr(5);
        const std::string text = read_file(path);
        m.inputs.emplace_back(path, fnv1a64_hex(text));
        // The density matrix file uses the Hamiltonian JSON layout (it is an
        // Hermitian matrix); the state constructor enforces the rest.
        return InitialState::custom(parse_hamiltonian_json(text).matrix());
    }
    throw ValidationError("unknown --initial: " + s + " (uniform | node:i | file:PATH)");
}

TimeMode parse_time(const std::string& s) {
    if (s == "inf") return TimeMode::inf();
    return TimeMode::at(parse_real(s, "--t"));
}

struct CloseSpec {
    ClosenessKind kind = ClosenessKind::transport_inf;
    TimeMode tm = TimeMode::inf();
};

CloseSpec parse_closeness(const std::string& s) {
    if (s == "transport-short") return {ClosenessKind::transport_short, TimeMode::inf()};
    if (s == "transport-inf") return {ClosenessKind::transport_inf, TimeMode::inf()};
    if (s == "fidelity-inf") return {ClosenessKind::fidelity_inf, TimeMode::inf()};
    if (s == "purity-inf") return {ClosenessKind::purity_inf, TimeMode::inf()};
    const std::pair<const char*, ClosenessKind> timed[] = {
        {"transport-t=", ClosenessKind::transport_t},
        {"fidelity-t=", ClosenessKind::fidelity_t},
        {"purity-t=", ClosenessKind::purity_t},
    };
    for (const auto& [prefix, kind] : timed) {
        if (s.rfind(prefix, 0) == 0)
            return {kind, TimeMode::at(parse_real(s.substr(std::strlen(prefix)), "--closeness time"))};
    }
    throw ValidationError(
        "unknown --closeness: " + s +
        " (transport-short | transport-inf | transport-t=T | fidelity-inf | "
        "fidelity-t=T | purity-inf | purity-t=T)");
}

struct PhaseSpec {
    bool random = false;
    int samples = 0;
};

PhaseSpec parse_phases(const std::string& s) {
    if (s == "zero") return {};
    if (s.rfind("random:", 0) == 0) {
        const std::uint64_t n = parse_u64(s.substr(7), "--phases sample count");
        if (n == 0) throw ValidationError("--phases random: sample count must be >= 1");
        return {true, int(n)};
    }
    throw ValidationError("unknown --phases: " + s + " (zero | random:N)");
}

ClosenessMatrix build_closeness(const Hamiltonian& h, const CloseSpec& cs,
                                double degeneracy_tol, const PhaseSpec& phases,
                                std::uint64_t seed) {
    if (cs.kind == ClosenessKind::transport_short) return closeness_transport_short(h);
    const SpectralDecomposition dec = decompose(h, degeneracy_tol);
    switch (cs.kind) {
        case ClosenessKind::transport_t:
        case ClosenessKind::transport_inf:
            return closeness_transport(dec, cs.tm);
        case ClosenessKind::fidelity_t:
        case ClosenessKind::fidelity_inf:
            if (phases.random)
                return closeness_fidelity_random_phases(dec, cs.tm, phases.samples, seed);
            return closeness_fidelity(dec, cs.tm);
        case ClosenessKind::purity_t:
        case ClosenessKind::purity_inf:
            return closeness_purity(dec, cs.tm);
        default:
            throw ValidationError("unhandled closeness kind");
    }
}

struct Selection {
    Partition part;
    double q = 0.0;
};

Selection select_partition(const Dendrogram& d, const Eigen::MatrixXd& adj,
                           const std::string& sel) {
    if (sel == "modularity") {
        auto [p, q] = best_partition(d, adj);
        return {std::move(p), q};
    }
    if (sel.rfind("k=", 0) == 0) {
        const std::uint64_t k = parse_u64(sel.substr(2), "--select k");
        if (k < 1) throw ValidationError("--select k must be >= 1");
        for (const Partition& p : d.levels()) {
            if (p.k() == int(k)) {
                const double total =
                    adj.cwiseAbs().sum() - adj.diagonal().cwiseAbs().sum();
                const double q = total > 0.0 ? signed_modularity(adj, p) : 0.0;
                return {p, q};
            }
        }
        throw ValidationError("no dendrogram level has exactly " + sel.substr(2) +
                              " communities");
    }
    throw ValidationError("unknown --select: " + sel + " (modularity | k=K)");
}

void emit(const std::optional<std::string>& out, const std::string& payload,
          Manifest& manifest, bool quiet_stdout = false) {
    if (out) {
        manifest.outputs.push_back(*out);
        write_file_atomic(*out, payload);
        write_manifest(manifest, *out);
        std::printf("wrote %s\n", out->c_str());
    } else if (!quiet_stdout) {
        std::fputs(payload.c_str(), stdout);
    }
}

// ---- gen ----------------------------------------------------------------------

struct GenOpts {
    std::string model;
    int n = 500;
    double mean_degree = 6.0;
    int edges = -1;
    int m_attach = -1;
    std::string sizes = "15,15,15,15";
    double p_intra = 0.5;
    double p_inter = 0.05;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::optional<std::string> out;
};

void run_gen(const GenOpts& o) {
    Manifest m;
    m.command = "gen";
    const std::uint64_t seed = resolve_seed(o.seed_opt, o.seed);
    m.seeds = {seed};
    m.params = {{"model", o.model}, {"seed", std::to_string(seed)}};

    if (o.model == "planted") {
        const std::vector<int> sizes = parse_int_list(o.sizes, "--sizes");
        m.params.emplace_back("sizes", o.sizes);
        m.params.emplace_back("p_intra", fmt17(o.p_intra));
        m.params.emplace_back("p_inter", fmt17(o.p_inter));
        const PlantedGraph pg = gen_planted(sizes, o.p_intra, o.p_inter, seed);
        if (o.out) {
            const std::string ppath = derived_path(*o.out, ".planted");
            write_file_atomic(ppath, partition_to_json(pg.partition));
            m.outputs.push_back(ppath);
        }
        emit(o.out, graph_to_json(pg.graph), m);
        if (o.out)
            std::printf("n = %d, edges = %zu, planted communities = %d\n", pg.graph.n(),
                        pg.graph.edges().size(), pg.partition.k());
        return;
    }

    Graph g = Graph::make(1, {});
    if (o.model == "ba") {
        const int ma = o.m_attach >= 0 ? o.m_attach : int(std::lround(o.mean_degree / 2.0));
        m.params.emplace_back("n", std::to_string(o.n));
        m.params.emplace_back("m_attach", std::to_string(ma));
        g = gen_ba(o.n, ma, seed);
    } else if (o.model == "er" || o.model == "ws" || o.model == "rg") {
        const int medges =
            o.edges >= 0 ? o.edges : int(std::lround(o.mean_degree * o.n / 2.0));
        m.params.emplace_back("n", std::to_string(o.n));
        m.params.emplace_back("edges", std::to_string(medges));
        if (o.model == "er")
            g = gen_er(o.n, medges, seed);
        else if (o.model == "ws")
            g = gen_ws(o.n, medges, seed);
        else
            g = gen_rg(o.n, medges, seed);
    } else {
        throw ValidationError("unknown --model: " + o.model +
                              " (ba | er | ws | rg | planted)");
    }
    emit(o.out, graph_to_json(g), m);
    if (o.out) std::printf("n = %d, edges = %zu\n", g.n(), g.edges().size());
}

// ---- walk ---------------------------------------------------------------------

struct WalkOpts {
    HInput in;
    std::string initial = "uniform";
    std::string t = "inf";
    double degeneracy_tol = -1.0;
    CLI::Option* tol_opt = nullptr;
    std::optional<std::string> out;
};

void run_walk(const WalkOpts& o) {
    Manifest m;
    m.command = "walk";
    m.params = {{"initial", o.initial}, {"t", o.t}};

    const TimeMode tm = parse_time(o.t);
    const bool graph_route = !o.in.graph_path.empty();
    const bool custom_tol = o.tol_opt != nullptr && o.tol_opt->count() > 0;

    WalkReport report;
    std::optional<SpectralDecomposition> dec;
    InitialState rho0 = InitialState::uniform();
    if (graph_route && o.in.hamiltonian_path.empty()) {
        const Graph g = o.in.load_graph_logged(m);
        if (o.in.h_kind_opt != nullptr && o.in.h_kind_opt->count() > 0 &&
            o.in.h_kind != "quantum")
            throw ValidationError("walk uses the quantum generator for graph inputs");
        rho0 = parse_initial(o.initial, m);
        if (custom_tol || !tm.infinite)
            dec = decompose(quantum_generator(g), o.degeneracy_tol);
        report = custom_tol ? make_walk_report(*dec, rho0) : make_walk_report(g, rho0);
    } else {
        const Hamiltonian h = o.in.load(m);
        rho0 = parse_initial(o.initial, m);
        dec = decompose(h, o.degeneracy_tol);
        report = make_walk_report(*dec, rho0);
    }

    std::string payload;
    if (!tm.infinite) {
        const Eigen::VectorXd p_q_t = avg_density(*dec, rho0, tm).diagonal().real();
        payload = walk_report_to_json(report, &p_q_t);
    } else {
        payload = walk_report_to_json(report);
    }
    emit(o.out, payload, m);
    if (o.out) std::printf("epsilon = %s\n", fmt17(report.epsilon).c_str());
}

// ---- quantumness ----------------------------------------------------------------

struct QuantumnessOpts {
    HInput in;
    double degeneracy_tol = -1.0;
    std::optional<std::string> out;
};

void run_quantumness(const QuantumnessOpts& o) {
    Manifest m;
    m.command = "quantumness";
    if (o.in.graph_path.empty())
        throw ValidationError("quantumness requires --graph (degree form needs degrees)");
    if (!o.in.hamiltonian_path.empty())
        throw ValidationError("quantumness takes a graph input only");
    const Graph g = o.in.load_graph_logged(m);

    const SpectralDecomposition dec = decompose(quantum_generator(g), o.degeneracy_tol);
    const InitialState rho0 = InitialState::uniform();
    const double eps = quantumness(dec, rho0);
    const double eps_deg = quantumness_uniform_degree_form(g);
    if (std::abs(eps - eps_deg) > 1e-8)
        throw NumericalError("spectral and degree-form quantumness disagree: " +
                             fmt17(eps) + " vs " + fmt17(eps_deg));
    const EnergyGap eg = energy_gap_bound(dec, rho0);
    const double hbound = entropy_bound(g);

    JsonWriter w;
    w.begin_object();
    w.key("epsilon");
    w.value(eps);
    w.key("epsilon_degree_form");
    w.value(eps_deg);
    w.key("energy");
    w.value(eg.energy);
    w.key("gap");
    w.value(eg.gap);
    w.key("energy_gap_ratio");
    w.value(eg.energy / eg.gap);
    w.key("energy_gap_bound_ok");
    w.value(eg.bound_ok);
    w.key("entropy_bound");
    w.value(hbound);
    w.key("entropy_bound_ok");
    w.value(eps <= hbound + 1e-9);
    w.end_object();

    emit(o.out, w.str(), m, true);
    std::printf("epsilon = %s\n", fmt17(eps).c_str());
    std::printf("energy = %s\n", fmt17(eg.energy).c_str());
    std::printf("gap = %s\n", fmt17(eg.gap).c_str());
    std::printf("energy_gap_ratio = %s\n", fmt17(eg.energy / eg.gap).c_str());
    std::printf("entropy_bound = %s\n", fmt17(hbound).c_str());
}

// ---- communities ---------------------------------------------------------------

struct CommunitiesOpts {
    HInput in;
    std::string closeness = "transport-inf";
    std::string phases = "zero";
    std::string select = "modularity";
    double degeneracy_tol = -1.0;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::optional<std::string> out;
};

std::string partition_payload(const std::string& closeness, const std::string& select,
                              const Selection& sel) {
    JsonWriter w;
    w.begin_object();
    w.key("closeness");
    w.value(closeness);
    w.key("select");
    w.value(select);
    w.key("k");
    w.value(sel.part.k());
    w.key("q");
    w.value(sel.q);
    w.key("assignment");
    w.begin_array(true);
    for (int a : sel.part.assignment) w.value(a);
    w.end_array();
    w.end_object();
    return w.str();
}

void run_communities(const CommunitiesOpts& o) {
    Manifest m;
    m.command = "communities";
    const std::uint64_t seed = resolve_seed(o.seed_opt, o.seed);
    m.params = {{"closeness", o.closeness},
                {"phases", o.phases},
                {"select", o.select},
                {"degeneracy_tol", fmt17(o.degeneracy_tol)},
                {"h_kind", o.in.h_kind}};
    const PhaseSpec phases = parse_phases(o.phases);
    if (phases.random) m.seeds = {seed};

    const Hamiltonian h = o.in.load(m);
    const CloseSpec cs = parse_closeness(o.closeness);
    const ClosenessMatrix c = build_closeness(h, cs, o.degeneracy_tol, phases, seed);
    const Dendrogram d = agglomerate(c);
    const Selection sel = select_partition(d, c.c, o.select);

    if (o.out) {
        const std::string dpath = derived_path(*o.out, ".dendrogram");
        write_file_atomic(dpath, dendrogram_to_json(d));
        m.outputs.push_back(dpath);
    }
    emit(o.out, partition_payload(closeness_kind_name(c.kind), o.select, sel), m);
    if (o.out) std::printf("k = %d\nq = %s\n", sel.part.k(), fmt17(sel.q).c_str());
}

// ---- nmi ------------------------------------------------------------------------

struct NmiOpts {
    std::string a;
    std::string b;
    std::optional<std::string> out;
};

void run_nmi(const NmiOpts& o) {
    Manifest m;
    m.command = "nmi";
    const std::string ta = read_file(o.a);
    const std::string tb = read_file(o.b);
    m.inputs.emplace_back(o.a, fnv1a64_hex(ta));
    m.inputs.emplace_back(o.b, fnv1a64_hex(tb));
    const double v = nmi(parse_partition_json(ta), parse_partition_json(tb));
    JsonWriter w;
    w.begin_object();
    w.key("nmi");
    w.value(v);
    w.end_object();
    emit(o.out, w.str(), m, true);
    std::printf("%s\n", fmt17(v).c_str());
}

// ---- perturb ----------------------------------------------------------------------

struct PerturbOpts {
    HInput in;
    std::string closeness = "fidelity-inf";
    std::string select = "modularity";
    std::string sigmas = "0.1,0.5,1.0,2.0";
    int samples = 50;
    int jobs = 1;
    double degeneracy_tol = -1.0;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    bool csv = false;
    std::optional<std::string> out;
};

void run_perturb(const PerturbOpts& o) {
    Manifest m;
    m.command = "perturb";
    const std::uint64_t seed = resolve_seed(o.seed_opt, o.seed);
    m.seeds = {seed};
    m.params = {{"closeness", o.closeness}, {"select", o.select},
                {"sigmas", o.sigmas},       {"samples", std::to_string(o.samples)},
                {"h_kind", o.in.h_kind},    {"jobs", std::to_string(o.jobs)}};
    if (o.samples < 1) throw ValidationError("--samples must be >= 1");
    if (o.jobs < 1) throw ValidationError("--jobs must be >= 1");
    const std::vector<double> sigmas = parse_real_list(o.sigmas, "--sigmas");
    for (double s : sigmas)
        if (s < 0.0) throw ValidationError("--sigmas entries must be >= 0");

    const Hamiltonian h = o.in.load(m);
    const CloseSpec cs = parse_closeness(o.closeness);
    const ClosenessMatrix c0 = build_closeness(h, cs, o.degeneracy_tol, {}, seed);
    const Selection base = select_partition(agglomerate(c0), c0.c, o.select);

    struct Row {
        double sigma, mean, stderr_;
    };
    std::vector<Row> rows;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        PhasePerturbSpec spec;
        spec.sigma = sigmas[si];
        spec.samples = o.samples;
        spec.seed = seed + si;  // one substream family per sigma
        const std::vector<Hamiltonian> hs = perturb_phases(h, spec);
        std::vector<double> vals(hs.size(), 0.0);
        const int jobs = std::min<int>(o.jobs, int(hs.size()));
        std::vector<std::thread> pool;
        std::exception_ptr fail;
        std::mutex fail_mu;
        for (int w0 = 0; w0 < jobs; ++w0) {
            pool.emplace_back([&, w0]() {
                try {
                    for (std::size_t i = std::size_t(w0); i < hs.size();
                         i += std::size_t(jobs)) {
                        const ClosenessMatrix ci =
                            build_closeness(hs[i], cs, o.degeneracy_tol, {}, seed);
                        const Selection sel = select_partition(agglomerate(ci), ci.c, o.select);
                        vals[i] = nmi(sel.part, base.part);
                    }
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(fail_mu);
                    if (!fail) fail = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (fail) std::rethrow_exception(fail);

        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= double(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double stderr_ =
            vals.size() > 1 ? std::sqrt(var / double(vals.size() - 1)) /
                                  std::sqrt(double(vals.size()))
                            : 0.0;
        rows.push_back({sigmas[si], mean, stderr_});
    }

    std::string payload;
    if (o.csv) {
        std::string s = "sigma,mean_nmi,stderr_nmi,samples\n";
        for (const Row& r : rows)
            s += fmt17(r.sigma) + "," + fmt17(r.mean) + "," + fmt17(r.stderr_) + "," +
                 std::to_string(o.samples) + "\n";
        payload = s;
    } else {
        JsonWriter w;
        w.begin_object();
        w.key("baseline_k");
        w.value(base.part.k());
        w.key("samples");
        w.value(o.samples);
        w.key("rows");
        w.begin_array();
        for (const Row& r : rows) {
            w.begin_object();
            w.key("sigma");
            w.value(r.sigma);
            w.key("mean_nmi");
            w.value(r.mean);
            w.key("stderr_nmi");
            w.value(r.stderr_);
            w.end_object();
        }
        w.end_array();
        w.end_object();
        payload = w.str();
    }
    emit(o.out, payload, m);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-walk network toolkit"};
    app.set_version_flag("--version", std::string("qwalk ") + kVersion);
    app.require_subcommand(1);

    GenOpts gen;
    CLI::App* cgen = app.add_subcommand("gen", "generate a graph");
    cgen->add_option("--model", gen.model, "ba | er | ws | rg | planted")->required();
    cgen->add_option("-n,--nodes", gen.n, "node count (before giant extraction)");
    cgen->add_option("--mean-degree", gen.mean_degree, "target mean degree (default 6)");
    cgen->add_option("--edges", gen.edges, "edge count override for er/ws/rg");
    cgen->add_option("--m-attach", gen.m_attach, "attachment count override for ba");
    cgen->add_option("--sizes", gen.sizes, "planted community sizes, e.g. 15,15,15,15");
    cgen->add_option("--p-intra", gen.p_intra, "planted intra-community edge probability");
    cgen->add_option("--p-inter", gen.p_inter, "planted inter-community edge probability");
    gen.seed_opt = cgen->add_option("--seed", gen.seed, "RNG seed (default QWALK_SEED or 0)");
    cgen->add_option("-o,--output", gen.out, "output graph JSON path");

    WalkOpts walk;
    CLI::App* cwalk = app.add_subcommand("walk", "walk report for a graph or Hamiltonian");
    walk.in.add_to(cwalk, "quantum");
    cwalk->add_option("--initial", walk.initial, "uniform | node:i | file:PATH");
    cwalk->add_option("--t", walk.t, "finite averaging time or 'inf'");
    walk.tol_opt =
        cwalk->add_option("--degeneracy-tol", walk.degeneracy_tol,
                          "eigenvalue grouping tolerance (default: automatic)");
    cwalk->add_option("-o,--output", walk.out, "output report JSON path");

    QuantumnessOpts quant;
    CLI::App* cquant = app.add_subcommand("quantumness", "quantumness and bounds for a graph");
    quant.in.add_to(cquant, "quantum");
    cquant->add_option("--degeneracy-tol", quant.degeneracy_tol,
                       "eigenvalue grouping tolerance (default: automatic)");
    cquant->add_option("-o,--output", quant.out, "output JSON path");

    CommunitiesOpts comm;
    CLI::App* ccomm = app.add_subcommand("communities", "closeness, dendrogram and partition");
    comm.in.add_to(ccomm, "quantum");
    ccomm->add_option("--closeness", comm.closeness,
                      "transport-short | transport-inf | transport-t=T | fidelity-inf | "
                      "fidelity-t=T | purity-inf | purity-t=T");
    ccomm->add_option("--phases", comm.phases,
                      "fidelity initial-state phases: zero | random:N");
    ccomm->add_option("--select", comm.select, "modularity | k=K");
    ccomm->add_option("--degeneracy-tol", comm.degeneracy_tol,
                      "eigenvalue grouping tolerance (default: automatic)");
    comm.seed_opt =
        ccomm->add_option("--seed", comm.seed, "seed for --phases random:N");
    ccomm->add_option("-o,--output", comm.out,
                      "partition JSON path (dendrogram goes to *.dendrogram.json)");

    NmiOpts nmi_o;
    CLI::App* cnmi = app.add_subcommand("nmi", "normalized mutual information of two partitions");
    cnmi->add_option("a", nmi_o.a, "first partition JSON")->required();
    cnmi->add_option("b", nmi_o.b, "second partition JSON")->required();
    cnmi->add_option("-o,--output", nmi_o.out, "output JSON path");

    PerturbOpts pert;
    CLI::App* cpert = app.add_subcommand(
        "perturb", "partition stability under random hopping-phase perturbations");
    pert.in.add_to(cpert, "adjacency");
    cpert->add_option("--closeness", pert.closeness, "closeness measure (default fidelity-inf)");
    cpert->add_option("--select", pert.select, "modularity | k=K");
    cpert->add_option("--sigmas", pert.sigmas, "comma-separated phase std devs");
    cpert->add_option("--samples", pert.samples, "perturbation samples per sigma");
    cpert->add_option("--jobs", pert.jobs, "worker threads over samples");
    cpert->add_option("--degeneracy-tol", pert.degeneracy_tol,
                      "eigenvalue grouping tolerance (default: automatic)");
    pert.seed_opt = cpert->add_option("--seed", pert.seed, "RNG seed (default QWALK_SEED or 0)");
    cpert->add_flag("--csv", pert.csv, "emit CSV instead of JSON");
    cpert->add_option("-o,--output", pert.out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cgen->parsed()) run_gen(gen);
        else if (cwalk->parsed()) run_walk(walk);
        else if (cquant->parsed()) run_quantumness(quant);
        else if (ccomm->parsed()) run_communities(comm);
        else if (cnmi->parsed()) run_nmi(nmi_o);
        else if (cpert->parsed()) run_perturb(pert);
        return 0;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
