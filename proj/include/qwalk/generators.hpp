#pragma once

/*
 * Seeded network generators and the two randomized experiment drivers
 * (edge-weight randomization toward a target quantumness, hopping-phase
 * perturbation).
 *
 * Determinism: every generator consumes a single named PRNG (mt19937_64).
 * Replicated experiments derive one independent substream per replicate from
 * (seed, replicate index), so results do not depend on thread scheduling.
 */

#include <cstdint>
#include <random>
#include <vector>

#include "qwalk/community.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

enum class GenModel { ba, er, ws, rg, planted };

// index-th output of the splitmix64 stream seeded with `seed`.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);

// Independent replicate stream: mt19937_64 seeded with splitmix64_at.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

// Raw edge sets, before any giant-component extraction. Degree statistics of
// the model (including isolated nodes) are computed from these.
std::vector<Edge> er_edges(int n, int m, std::mt19937_64& rng);
std::vector<Edge> ws_edges(int n, int m, std::mt19937_64& rng);
std::vector<Edge> rg_edges(int n, int m, std::mt19937_64& rng);
std::vector<Edge> ba_edges(int n, int m_attach, std::mt19937_64& rng);

// m uniformly random distinct edges; giant component extracted.
Graph gen_er(int n, int m, std::uint64_t seed);

// Ring 0-1-...-(n-1)-0 plus (m - n) distinct non-ring edges. Connected by
// construction, so no extraction. Requires m >= n.
Graph gen_ws(int n, int m, std::uint64_t seed);

// n uniform points on the unit square, the m closest pairs become edges;
// giant component extracted.
Graph gen_rg(int n, int m, std::uint64_t seed);

// Preferential attachment from a (m_attach + 1)-clique; each new node picks
// m_attach distinct targets with probability proportional to degree.
Graph gen_ba(int n, int m_attach, std::uint64_t seed);

struct PlantedGraph {
    Graph graph;
    Partition partition;  // ground truth block membership
};

// Independent Bernoulli edges: p_intra inside a block, p_inter across.
// The result can be disconnected (p_inter = 0 guarantees it).
PlantedGraph gen_planted(const std::vector<int>& sizes, double p_intra, double p_inter,
                         std::uint64_t seed);

struct WeightRandomization {
    Graph graph;
    double epsilon = 0.0;   // achieved uniform-state quantumness (degree form)
    bool converged = false; // |epsilon - target| <= 0.01
};

// Monte Carlo on edge weights: double or halve a random edge, keep the step
// iff |eps - target| does not increase. Topology never changes.
WeightRandomization randomize_weights(const Graph& g, double target_eps, int max_iters,
                                      std::uint64_t seed);

struct PhasePerturbSpec {
    double sigma = 0.0;  // std dev of the Gaussian phase, radians
    int samples = 1;
    std::uint64_t seed = 0;
};

// Per sample: H'_ij = H_ij * exp(i phi_ij) for every pair i < j with
// phi ~ N(0, sigma^2), Hermitian completion, diagonal untouched. Magnitudes
// are preserved exactly; sigma = 0 reproduces the input bit for bit.
std::vector<Hamiltonian> perturb_phases(const Hamiltonian& h, const PhasePerturbSpec& spec);

}  // namespace qwalk
