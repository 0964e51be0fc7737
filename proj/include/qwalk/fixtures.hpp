// Small bundled systems used by tests and examples.
#pragma once

#include <cstdint>

#include "qwalk/graph.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

// Two disjoint unit-weight triangles {0,1,2} and {3,4,5}.
Graph make_two_triangles();

// Six-node toy: the two triangles above joined by bridge edges
// (1,3), (1,4), (2,3), (2,4). All weights 1.
Graph make_toy_graph();

// Phase assignment for the four bridge entries of the toy Hamiltonian,
// in bridge order (1,3), (1,4), (2,3), (2,4).
//   coherent:  +1, +1, +1, +1
//   canceling: +1, +1, -1, -1
//   random:    e^{i phi} with phi ~ U[0, 2pi) drawn from substream(seed, 0)
enum class ToyPhases { coherent, canceling, random };

// Toy Hamiltonian: adjacency of make_toy_graph() with the bridge entries
// replaced by the chosen phases. Triangle entries stay +1, diagonal 0.
// seed is only consumed for ToyPhases::random.
Hamiltonian make_toy_hamiltonian(ToyPhases kind, std::uint64_t seed = 0);

}  // namespace qwalk
