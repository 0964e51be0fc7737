#pragma once

/*
 * Weighted undirected simple graph with the derived matrices used by the walk
 * generators: adjacency A, degree matrix D and Laplacian L = D - A.
 *
 * Node indices are 0-based. Edges are stored as (i, j, w) with i < j, sorted
 * by (i, j), weights strictly positive. Isolated nodes are legal here; the
 * walk layer rejects them because D^{-1} must exist.
 */

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qwalk {

struct Edge {
    int i = 0;
    int j = 0;
    double w = 1.0;
};

class Graph {
  public:
    // Validates and normalizes: orders endpoints, sorts the edge list,
    // rejects self-loops, duplicates, out-of-range indices and w <= 0.
    static Graph make(int n, std::vector<Edge> edges);

    int n() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }

    Eigen::MatrixXd adjacency() const;
    Eigen::VectorXd degree_vector() const;
    Eigen::MatrixXd laplacian() const;

    bool has_isolated_node() const;
    bool connected() const;

    // Connected component id per node, ids ordered by smallest member index.
    std::vector<int> components() const;

  private:
    Graph() = default;
    int n_ = 0;
    std::vector<Edge> edges_;
};

// d_i = sum_j A_ij.
Eigen::VectorXd degrees(const Graph& g);

// L = D - A. Rows sum to zero.
Eigen::MatrixXd laplacian(const Graph& g);

struct GiantComponent {
    Graph graph;
    // old index -> new index, -1 for dropped nodes.
    std::vector<int> index_map;
};

// Largest connected component; ties broken by the component whose minimum
// original index is smallest. Node order within the component is preserved.
GiantComponent giant_component(const Graph& g);

struct LabeledGraph {
    Graph graph;
    std::optional<std::vector<std::string>> labels;
};

enum class GraphFormat { json, edgelist };

// JSON: {"n": int, "edges": [[i, j, w], ...]} with i < j, w optional (1.0).
// Edge list: one "i j [w]" per line, '#' starts a comment.
LabeledGraph load_graph(const std::string& path, GraphFormat format);

// Parse from in-memory text (same validation as load_graph).
Graph parse_graph_json(const std::string& text);
Graph parse_graph_edgelist(const std::string& text);

std::string graph_to_json(const Graph& g);

}  // namespace qwalk
