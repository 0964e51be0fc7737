#pragma once

/*
 * Dense Hermitian eigendecomposition with grouping of (near-)degenerate
 * eigenvalues into eigenspace projectors.
 *
 * Long-time averages depend only on the distinct eigenvalues: exact
 * degeneracies split by floating-point noise would corrupt them, so
 * eigenvalues are chained into groups (consecutive gap <= tol) before any
 * projector is formed. Projectors are basis-free within a group.
 */

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/graph.hpp"

namespace qwalk {

class Hamiltonian {
  public:
    // Validates: finite entries, Hermitian within 1e-12 * max|entry|.
    static Hamiltonian make(Eigen::MatrixXcd m);

    int n() const { return int(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

  private:
    Hamiltonian() = default;
    Eigen::MatrixXcd m_;
};

// H = A: hopping amplitudes equal to edge weights, zero on-site energies.
Hamiltonian adjacency_hamiltonian(const Graph& g);

struct EigenGroup {
    double energy = 0.0;  // representative value: mean of member eigenvalues
    int lo = 0;           // first member column in eigenvectors
    int count = 0;
};

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // orthonormal columns, column k <-> eigenvalues[k]
    std::vector<EigenGroup> groups; // empty until group_eigenspaces has run

    int n() const { return int(eigenvalues.size()); }
    bool grouped() const { return !groups.empty(); }

    // Projector onto group k: sum of v v^dag over member columns.
    Eigen::MatrixXcd projector(int k) const;

    // max |eigenvalue|; equals the spectral norm of the decomposed matrix.
    double spectral_norm() const;
};

// Residual contract: ||H v - lambda v||_2 <= 1e-10 * ||H||_2 per pair.
SpectralDecomposition eig_hermitian(const Hamiltonian& h);

// Chains consecutive eigenvalues with gap <= tol into one group and assigns
// each group its mean energy. tol < 0 selects default_group_tol.
SpectralDecomposition group_eigenspaces(SpectralDecomposition dec, double tol);

// 1e-8 * (E_max - E_min + 1): scale-aware but nonzero for flat spectra.
double default_group_tol(const Eigen::VectorXd& eigenvalues);

// eig_hermitian + group_eigenspaces in one step.
SpectralDecomposition decompose(const Hamiltonian& h, double tol = -1.0);

// JSON: {"n": int, "entries": [[i, j, re, im], ...]} with i <= j; the lower
// triangle is implied by hermiticity; diagonal entries require im = 0.
Hamiltonian parse_hamiltonian_json(const std::string& text);
Hamiltonian load_hamiltonian(const std::string& path);
std::string hamiltonian_to_json(const Hamiltonian& h);

}  // namespace qwalk
