#include "qwalk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qwalk/errors.hpp"
#include "json_writer.hpp"

namespace qwalk {

using nlohmann::json;

Graph Graph::make(int n, std::vector<Edge> edges) {
    if (n < 1) throw ValidationError("graph: node count must be positive");
    for (auto& e : edges) {
        if (e.i == e.j)
            throw ValidationError("graph: self-loop at node " + std::to_string(e.i));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n)
            throw ValidationError("graph: edge (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + ") out of range for n=" +
                                  std::to_string(n));
        if (!(e.w > 0.0) || !std::isfinite(e.w))
            throw ValidationError("graph: non-positive or non-finite weight on edge (" +
                                  std::to_string(e.i) + "," + std::to_string(e.j) + ")");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    for (std::size_t k = 1; k < edges.size(); ++k)
        if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j)
            throw ValidationError("graph: duplicate edge (" + std::to_string(edges[k].i) +
                                  "," + std::to_string(edges[k].j) + ")");
    Graph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    return g;
}

Eigen::MatrixXd Graph::adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& e : edges_) {
        a(e.i, e.j) = e.w;
        a(e.j, e.i) = e.w;
    }
    return a;
}

Eigen::VectorXd Graph::degree_vector() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
    for (const auto& e : edges_) {
        d(e.i) += e.w;
        d(e.j) += e.w;
    }
    return d;
}

Eigen::MatrixXd Graph::laplacian() const {
    Eigen::MatrixXd l = -adjacency();
    Eigen::VectorXd d = degree_vector();
    for (int i = 0; i < n_; ++i) l(i, i) = d(i);
    return l;
}

bool Graph::has_isolated_node() const {
    std::vector<char> touched(n_, 0);
    for (const auto& e : edges_) touched[e.i] = touched[e.j] = 1;
    return std::any_of(touched.begin(), touched.end(), [](char c) { return !c; });
}

namespace {
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};
}  // namespace

std::vector<int> Graph::components() const {
    UnionFind uf(n_);
    for (const auto& e : edges_) uf.unite(e.i, e.j);
    // Roots are the minimum index of each component, so id order by first
    // appearance equals order by smallest member.
    std::vector<int> id(n_, -1);
    int next = 0;
    for (int v = 0; v < n_; ++v) {
        int r = uf.find(v);
        if (id[r] < 0) id[r] = next++;
        id[v] = id[r];
    }
    return id;
}

bool Graph::connected() const {
    if (n_ == 0) return false;
    auto comp = components();
    return *std::max_element(comp.begin(), comp.end()) == 0;
}

Eigen::VectorXd degrees(const Graph& g) { return g.degree_vector(); }
Eigen::MatrixXd laplacian(const Graph& g) { return g.laplacian(); }

GiantComponent giant_component(const Graph& g) {
    if (g.n() == 0) throw ValidationError("giant_component: empty graph");
    auto comp = g.components();
    int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<int> size(ncomp, 0);
    for (int c : comp) ++size[c];
    // Component ids are ordered by smallest member index, so the first
    // maximal-size id realizes the tie-break rule.
    int best = int(std::max_element(size.begin(), size.end()) - size.begin());

    std::vector<int> map(g.n(), -1);
    int next = 0;
    for (int v = 0; v < g.n(); ++v)
        if (comp[v] == best) map[v] = next++;
    std::vector<Edge> kept;
    for (const auto& e : g.edges())
        if (map[e.i] >= 0 && map[e.j] >= 0)
            kept.push_back({map[e.i], map[e.j], e.w});
    return {Graph::make(next, std::move(kept)), std::move(map)};
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Graph parse_graph_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("graph json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
        throw ValidationError("graph json: expected object with \"n\" and \"edges\"");
    if (!j["n"].is_number_integer())
        throw ValidationError("graph json: \"n\" must be an integer");
    int n = j["n"].get<int>();
    std::vector<Edge> edges;
    for (const auto& row : j["edges"]) {
        if (!row.is_array() || row.size() < 2 || row.size() > 3)
            throw ValidationError("graph json: edge rows must be [i, j] or [i, j, w]");
        if (!row[0].is_number_integer() || !row[1].is_number_integer())
            throw ValidationError("graph json: edge endpoints must be integers");
        Edge e;
        e.i = row[0].get<int>();
        e.j = row[1].get<int>();
        e.w = row.size() == 3 ? row[2].get<double>() : 1.0;
        if (e.i >= e.j)
            throw ValidationError("graph json: edges require i < j, got (" +
                                  std::to_string(e.i) + "," + std::to_string(e.j) + ")");
        edges.push_back(e);
    }
    return Graph::make(n, std::move(edges));
}

Graph parse_graph_edgelist(const std::string& text) {
    std::vector<Edge> edges;
    int maxidx = -1;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long i, j;
        if (!(ls >> i)) continue;  // blank or comment-only line
        double w = 1.0;
        if (!(ls >> j))
            throw ValidationError("edge list line " + std::to_string(lineno) +
                                  ": expected \"i j [w]\"");
        ls >> w;
        std::string trailing;
        if (ls >> trailing)
            throw ValidationError("edge list line " + std::to_string(lineno) +
                                  ": trailing token '" + trailing + "'");
        if (i < 0 || j < 0)
            throw ValidationError("edge list line " + std::to_string(lineno) +
                                  ": negative node index");
        edges.push_back({int(i), int(j), w});
        maxidx = std::max({maxidx, int(i), int(j)});
    }
    return Graph::make(maxidx + 1, std::move(edges));
}

LabeledGraph load_graph(const std::string& path, GraphFormat format) {
    const std::string text = read_file(path);
    Graph g = format == GraphFormat::json ? parse_graph_json(text) : parse_graph_edgelist(text);
    return {std::move(g), std::nullopt};
}

std::string graph_to_json(const Graph& g) {
    JsonWriter w;
    w.begin_object();
    w.key("n");
    w.value(g.n());
    w.key("edges");
    w.begin_array();
    for (const auto& e : g.edges()) {
        w.begin_array(true);
        w.value(e.i);
        w.value(e.j);
        w.value(e.w);
        w.end_array();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

}  // namespace qwalk
