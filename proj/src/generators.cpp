#include "qwalk/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "qwalk/errors.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64_at(seed, index));
}

namespace {

std::uint64_t pair_count(int n) { return std::uint64_t(n) * (n - 1) / 2; }

// Unranks index r in [0, n(n-1)/2) to the r-th pair (i, j), i < j, ordered
// lexicographically.
Edge unrank_pair(int n, std::uint64_t r) {
    int lo = 0, hi = n - 1;
    // offset(i) = number of pairs with first index < i
    const auto offset = [n](int i) {
        return std::uint64_t(i) * n - std::uint64_t(i) * (i + 1) / 2;
    };
    while (lo < hi) {
        const int mid = lo + (hi - lo + 1) / 2;
        if (offset(mid) <= r)
            lo = mid;
        else
            hi = mid - 1;
    }
    const int i = lo;
    const int j = i + 1 + int(r - offset(i));
    return {i, j, 1.0};
}

std::uint64_t rank_pair(int n, int i, int j) {
    return std::uint64_t(i) * n - std::uint64_t(i) * (i + 1) / 2 + std::uint64_t(j - i - 1);
}

}  // namespace

std::vector<Edge> er_edges(int n, int m, std::mt19937_64& rng) {
    if (n < 2) throw ValidationError("er: n must be >= 2");
    if (m <= 0 || std::uint64_t(m) > pair_count(n))
        throw ValidationError("er: m outside (0, n(n-1)/2]");
    std::uniform_int_distribution<std::uint64_t> dist(0, pair_count(n) - 1);
    std::unordered_set<std::uint64_t> chosen;
    std::vector<Edge> edges;
    edges.reserve(std::size_t(m));
    while (int(edges.size()) < m) {
        const std::uint64_t r = dist(rng);
        if (chosen.insert(r).second) edges.push_back(unrank_pair(n, r));
    }
    return edges;
}

std::vector<Edge> ws_edges(int n, int m, std::mt19937_64& rng) {
    if (n < 3) throw ValidationError("ws: n must be >= 3");
    if (m < n) throw ValidationError("ws: m must be >= n (the ring alone has n edges)");
    if (std::uint64_t(m) > pair_count(n)) throw ValidationError("ws: m exceeds n(n-1)/2");
    std::vector<Edge> edges;
    edges.reserve(std::size_t(m));
    std::unordered_set<std::uint64_t> taken;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        edges.push_back({std::min(i, j), std::max(i, j), 1.0});
        taken.insert(rank_pair(n, std::min(i, j), std::max(i, j)));
    }
    std::uniform_int_distribution<std::uint64_t> dist(0, pair_count(n) - 1);
    while (int(edges.size()) < m) {
        const std::uint64_t r = dist(rng);
        if (taken.insert(r).second) edges.push_back(unrank_pair(n, r));
    }
    return edges;
}

std::vector<Edge> rg_edges(int n, int m, std::mt19937_64& rng) {
    if (n < 2) throw ValidationError("rg: n must be >= 2");
    if (m <= 0 || std::uint64_t(m) > pair_count(n))
        throw ValidationError("rg: m outside (0, n(n-1)/2]");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[std::size_t(i)] = uni(rng);
        y[std::size_t(i)] = uni(rng);
    }
    struct Cand {
        double d2;
        int i, j;
    };
    std::vector<Cand> cands;
    cands.reserve(std::size_t(pair_count(n)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dx = x[std::size_t(i)] - x[std::size_t(j)];
            const double dy = y[std::size_t(i)] - y[std::size_t(j)];
            cands.push_back({dx * dx + dy * dy, i, j});
        }
    // Full sort (not nth_element) so distance ties resolve by (i, j) and the
    // edge set is a deterministic function of the points.
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(a.d2, a.i, a.j) < std::tie(b.d2, b.i, b.j);
    });
    std::vector<Edge> edges;
    edges.reserve(std::size_t(m));
    for (int k = 0; k < m; ++k) edges.push_back({cands[std::size_t(k)].i, cands[std::size_t(k)].j, 1.0});
    return edges;
}

std::vector<Edge> ba_edges(int n, int m_attach, std::mt19937_64& rng) {
    if (m_attach < 2) throw ValidationError("ba: m_attach must be >= 2");
    if (m_attach >= n) throw ValidationError("ba: m_attach must be < n");
    std::vector<Edge> edges;
    std::vector<int> urn;  // one entry per edge endpoint: multiplicity = degree
    const int m0 = m_attach + 1;
    for (int i = 0; i < m0; ++i)
        for (int j = i + 1; j < m0; ++j) {
            edges.push_back({i, j, 1.0});
            urn.push_back(i);
            urn.push_back(j);
        }
    std::vector<int> targets;
    for (int v = m0; v < n; ++v) {
        targets.clear();
        while (int(targets.size()) < m_attach) {
            std::uniform_int_distribution<std::size_t> pick(0, urn.size() - 1);
            const int cand = urn[pick(rng)];
            if (std::find(targets.begin(), targets.end(), cand) == targets.end())
                targets.push_back(cand);
        }
        // Urn grows only after the node finishes, so one node's edges never
        // bias each other.
        for (int t : targets) {
            edges.push_back({std::min(t, v), std::max(t, v), 1.0});
            urn.push_back(t);
            urn.push_back(v);
        }
    }
    return edges;
}

Graph gen_er(int n, int m, std::uint64_t seed) {
    auto rng = substream(seed, 0);
    return giant_component(Graph::make(n, er_edges(n, m, rng))).graph;
}

Graph gen_ws(int n, int m, std::uint64_t seed) {
    auto rng = substream(seed, 0);
    return Graph::make(n, ws_edges(n, m, rng));
}

Graph gen_rg(int n, int m, std::uint64_t seed) {
    auto rng = substream(seed, 0);
    return giant_component(Graph::make(n, rg_edges(n, m, rng))).graph;
}

Graph gen_ba(int n, int m_attach, std::uint64_t seed) {
    auto rng = substream(seed, 0);
    return Graph::make(n, ba_edges(n, m_attach, rng));
}

PlantedGraph gen_planted(const std::vector<int>& sizes, double p_intra, double p_inter,
                         std::uint64_t seed) {
    if (sizes.empty()) throw ValidationError("planted: no communities");
    for (int s : sizes)
        if (s <= 0) throw ValidationError("planted: empty community");
    if (p_intra < 0.0 || p_intra > 1.0 || p_inter < 0.0 || p_inter > 1.0)
        throw ValidationError("planted: probabilities must lie in [0, 1]");
    const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
    std::vector<int> block(static_cast<std::size_t>(n));
    int at = 0, b = 0;
    for (int s : sizes) {
        std::fill(block.begin() + at, block.begin() + at + s, b++);
        at += s;
    }
    auto rng = substream(seed, 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double p = block[std::size_t(i)] == block[std::size_t(j)] ? p_intra : p_inter;
            if (uni(rng) < p) edges.push_back({i, j, 1.0});
        }
    return {Graph::make(n, std::move(edges)), Partition::make(std::move(block))};
}

WeightRandomization randomize_weights(const Graph& g, double target_eps, int max_iters,
                                      std::uint64_t seed) {
    if (!(target_eps >= 0.0 && target_eps < 1.0))
        throw ValidationError("randomize weights: target must lie in [0, 1)");
    if (!g.connected())
        throw ValidationError("randomize weights: graph must be connected");
    if (g.edges().empty())
        throw ValidationError("randomize weights: graph has no edges");
    const int n = g.n();
    std::vector<Edge> edges = g.edges();
    Eigen::VectorXd d = g.degree_vector();
    double s_sqrt = d.cwiseSqrt().sum();  // sum of sqrt(d_i)
    double s_deg = d.sum();
    const auto eps_of = [n](double ssq, double sd) {
        return 1.0 - (ssq * ssq / double(n)) / sd;
    };

    auto rng = substream(seed, 0);
    std::uniform_int_distribution<std::size_t> pick_edge(0, edges.size() - 1);
    std::uniform_int_distribution<int> coin(0, 1);

    double err = std::abs(eps_of(s_sqrt, s_deg) - target_eps);
    int it = 0;
    for (; it < max_iters && err > 0.01; ++it) {
        Edge& e = edges[pick_edge(rng)];
        const double factor = coin(rng) ? 2.0 : 0.5;
        const double dw = (factor - 1.0) * e.w;
        const double di = d(e.i) + dw, dj = d(e.j) + dw;
        const double ns_sqrt =
            s_sqrt - std::sqrt(d(e.i)) - std::sqrt(d(e.j)) + std::sqrt(di) + std::sqrt(dj);
        const double ns_deg = s_deg + 2.0 * dw;
        const double nerr = std::abs(eps_of(ns_sqrt, ns_deg) - target_eps);
        if (nerr <= err) {
            e.w *= factor;
            d(e.i) = di;
            d(e.j) = dj;
            s_sqrt = ns_sqrt;
            s_deg = ns_deg;
            err = nerr;
        }
    }
    WeightRandomization out{Graph::make(n, std::move(edges)), 0.0, false};
    out.epsilon = quantumness_uniform_degree_form(out.graph);  // exact, no drift
    out.converged = std::abs(out.epsilon - target_eps) <= 0.01;
    return out;
}

std::vector<Hamiltonian> perturb_phases(const Hamiltonian& h, const PhasePerturbSpec& spec) {
    if (spec.sigma < 0.0) throw ValidationError("perturb phases: sigma must be >= 0");
    if (spec.samples < 1) throw ValidationError("perturb phases: samples must be >= 1");
    const int n = h.n();
    std::vector<Hamiltonian> out;
    out.reserve(std::size_t(spec.samples));
    for (int s = 0; s < spec.samples; ++s) {
        auto rng = substream(spec.seed, std::uint64_t(s));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::MatrixXcd m = h.matrix();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double phi = spec.sigma * gauss(rng);
                if (phi != 0.0) {
                    m(i, j) *= std::polar(1.0, phi);
                    m(j, i) = std::conj(m(i, j));
                }
            }
        out.push_back(Hamiltonian::make(std::move(m)));
    }
    return out;
}

}  // namespace qwalk
