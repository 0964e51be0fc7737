#pragma once

/*
 * Node-pair closeness measures derived from the quantum walk, agglomerative
 * hierarchical clustering over them, and modularity-based level selection.
 *
 * Node matrices store the per-pair base values; the community-level closeness
 * used while merging is the size-normalized block sum
 *     c(A, B) = 2 / (|A| |B|) * sum_{i in A, j in B} base_ij,
 * which reproduces each measure's pairwise form on singletons.
 *
 * Transport and purity closeness are non-negative; fidelity closeness can be
 * negative, so partition quality falls back to the signed modularity split.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/spectral.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

enum class ClosenessKind {
    transport_short,  // |H_ij|^2
    transport_t,      // time-averaged transfer matrix, symmetrized
    transport_inf,
    fidelity_t,       // Re(rho_avg_ij(t) rho_ji(0)), uniform initial state
    fidelity_inf,
    purity_t,         // |rho_ij(t)|^2 (instantaneous)
    purity_inf        // long-time average of |rho_ij(t)|^2
};

std::string closeness_kind_name(ClosenessKind kind);

struct ClosenessMatrix {
    Eigen::MatrixXd c;  // symmetric, zero diagonal
    ClosenessKind kind = ClosenessKind::transport_short;
};

ClosenessMatrix closeness_transport_short(const Hamiltonian& h);
ClosenessMatrix closeness_transport(const SpectralDecomposition& dec, TimeMode tm);

// Uniform superposition initial state; zero phases unless given.
ClosenessMatrix closeness_fidelity(const SpectralDecomposition& dec, TimeMode tm);
// Averaged over `samples` draws of i.i.d. uniform [0, 2pi) phases.
ClosenessMatrix closeness_fidelity_random_phases(const SpectralDecomposition& dec,
                                                 TimeMode tm, int samples,
                                                 std::uint64_t seed);

ClosenessMatrix closeness_purity(const SpectralDecomposition& dec, TimeMode tm);

struct Partition {
    std::vector<int> assignment;  // community ids 0..k-1, contiguous, all used

    // Validates contiguity; use from_labels for arbitrary label values.
    static Partition make(std::vector<int> assignment);
    // Canonicalizes arbitrary labels by order of first appearance.
    static Partition from_labels(const std::vector<int>& labels);

    int n() const { return int(assignment.size()); }
    int k() const;
    std::vector<std::vector<int>> communities() const;
};

Partition parse_partition_json(const std::string& text);
Partition load_partition(const std::string& path);
std::string partition_to_json(const Partition& p);

// One agglomeration step: the listed communities merge into one. Steps whose
// maxima tie merge disjoint sets in consecutive records at equal closeness.
struct MergeRecord {
    std::vector<std::vector<int>> communities;  // >= 2 node sets, each sorted
    double closeness = 0.0;
};

struct Dendrogram {
    int n = 0;
    std::vector<MergeRecord> merges;

    // Partitions from n singletons (front) down to one community (back).
    std::vector<Partition> levels() const;
};

std::string dendrogram_to_json(const Dendrogram& d);

// Greedy agglomeration: repeatedly merge the community pair with the largest
// closeness; pairs within relative 1e-9 of the step maximum merge
// simultaneously (transitively). Community closeness is always the exact
// block-sum formula above, never a distance-update recurrence, so exact ties
// (symmetric graphs) stay exact.
Dendrogram agglomerate(const ClosenessMatrix& base);

// Q = sum_A [ S_A / 2m - (K_A / 2m)^2 ] with m = (1/2) sum_ij adj_ij.
// Requires non-negative entries; diagonal is ignored.
double modularity(const Eigen::MatrixXd& adj, const Partition& p);

// Positive/negative split: Q = w+ Q+ - w- Q- with w+ = 2m+ / (2m+ + 2m-)
// and w- its mirror. Reduces exactly to modularity for non-negative adj.
double signed_modularity(const Eigen::MatrixXd& adj, const Partition& p);

// F = -sum of intra-community entries (both orientations).
double frustration(const Eigen::MatrixXd& adj, const Partition& p);

// Evaluates signed modularity at every dendrogram level; returns the best
// level and its Q. Ties within 1e-12 go to the level with fewer communities.
std::pair<Partition, double> best_partition(const Dendrogram& d, const Eigen::MatrixXd& adj);

}  // namespace qwalk
