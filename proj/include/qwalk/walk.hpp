#pragma once

/*
 * Continuous-time walks on a weighted network.
 *
 * Classical: dP/dt = -H_C P with H_C = L D^{-1}, stationary state
 * (P_C)_i = d_i / sum_j d_j. Quantum: U(t) = exp(-i H t) with H = H_Q =
 * D^{-1/2} L D^{-1/2} for graph inputs, or any Hermitian H supplied directly.
 *
 * The long-time average of the quantum walk splits into a classical-looking
 * piece carried by the ground state and a quantum correction:
 *     P_Q = (1 - eps) P_C + eps P~_Q,
 * where eps = 1 - <phi_0|rho(0)|phi_0> ("quantumness") measures how much of
 * the initial state lies outside the unique ground state phi_0.
 */

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "qwalk/graph.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

// A point in time or the t -> infinity limit of a time average.
struct TimeMode {
    bool infinite = true;
    double t = 0.0;

    static TimeMode inf() { return {true, 0.0}; }
    static TimeMode at(double t);  // requires t >= 0
};

// Initial state rho(0). Uniform and localized states are pure and get fast
// paths; custom accepts any density matrix (Hermitian, trace 1, PSD).
class InitialState {
  public:
    enum class Kind { uniform, localized, custom };

    static InitialState uniform();
    static InitialState localized(int node);
    // |psi> = n^{-1/2} sum_k e^{i theta_k} |k>.
    static InitialState phased_superposition(Eigen::VectorXd thetas);
    static InitialState custom(Eigen::MatrixXcd rho);  // validates invariants

    Kind kind() const { return kind_; }
    bool pure() const { return kind_ != Kind::custom; }
    int node() const { return node_; }

    // Pure-state amplitudes (uniform/localized/phased only).
    Eigen::VectorXcd amplitudes(int n) const;
    Eigen::MatrixXcd density(int n) const;

  private:
    InitialState() = default;
    Kind kind_ = Kind::uniform;
    int node_ = -1;
    Eigen::VectorXd thetas_;   // phased superposition only
    Eigen::MatrixXcd rho_;     // custom only
};

// Trace-1 Hermitian PSD check (1e-9 tolerances); throws ValidationError.
void validate_density(const Eigen::MatrixXcd& rho);

// H_C = L D^{-1}: columns sum to zero, unit diagonal. Requires no isolated
// nodes.
Eigen::MatrixXd classical_generator(const Graph& g);

// H_Q = D^{-1/2} L D^{-1/2}: real symmetric, unit diagonal. Requires no
// isolated nodes.
Hamiltonian quantum_generator(const Graph& g);

// (P_C)_i = d_i / sum_j d_j. Requires a connected graph.
Eigen::VectorXd stationary_classical(const Graph& g);

// Diagonal of the infinite-time average state: sum_k diag(L_k rho L_k).
Eigen::VectorXd longtime_distribution(const SpectralDecomposition& dec,
                                      const InitialState& rho0);

// eps = 1 - <phi_0|rho(0)|phi_0>. Requires a unique ground state (grouped
// lowest eigenspace of dimension 1); disconnected graphs fail this.
double quantumness(const SpectralDecomposition& dec, const InitialState& rho0);

// eps for the uniform zero-phase state on H_Q, straight from the degrees:
// eps = 1 - <sqrt(d)>^2 / <d>. Agrees with the spectral route to 1e-10.
double quantumness_uniform_degree_form(const Graph& g);

// (P~_Q)_i = (1/eps) sum_{k>0} diag(L_k rho L_k)_i. Throws NumericalError
// "no quantum correction" when eps <= 1e-12.
Eigen::VectorXd quantum_correction(const SpectralDecomposition& dec,
                                   const InitialState& rho0);

struct EnergyGap {
    double energy = 0.0;  // tr(H rho) - E_0, zero-referenced to the ground level
    double gap = 0.0;     // first distinct eigenvalue above the ground level
    bool bound_ok = false;  // eps <= energy / gap + 1e-9
};

EnergyGap energy_gap_bound(const SpectralDecomposition& dec, const InitialState& rho0);

// 1 - exp(H_1({d_i / sum d}))/n with H_1 the Shannon entropy; upper bound on
// the uniform-state eps.
double entropy_bound(const Graph& g);

// R_ab(t) = |<a|U(t)|b>|^2; doubly stochastic.
Eigen::MatrixXd transfer_matrix(const SpectralDecomposition& dec, double t);

// Time average of R over [0, t], or its t -> infinity limit
// sum_k |<a|L_k|b>|^2. Cost grows with (number of distinct eigenvalues)^2
// at finite t; intended for n up to a few hundred.
Eigen::MatrixXd avg_transfer_matrix(const SpectralDecomposition& dec, TimeMode tm);

// Time average of rho(t) over [0, t] or its limit sum_k L_k rho(0) L_k.
Eigen::MatrixXcd avg_density(const SpectralDecomposition& dec, const InitialState& rho0,
                             TimeMode tm);

struct WalkReport {
    Eigen::VectorXd p_classical;
    Eigen::VectorXd p_quantum;
    Eigen::VectorXd quantum_correction;
    double epsilon = 0.0;
    double energy = 0.0;
    double gap = 0.0;
    double entropy_bound = 0.0;
};

// Graph route: H = H_Q, p_classical from degrees, entropy bound from degrees.
WalkReport make_walk_report(const Graph& g, const InitialState& rho0);

// Hamiltonian route: p_classical_i = |<i|phi_0>|^2 and the entropy bound is
// evaluated on that vector. The bound is guaranteed only when phi_0 has
// non-negative amplitudes (true for H_Q); it is diagnostic otherwise.
WalkReport make_walk_report(const SpectralDecomposition& dec, const InitialState& rho0);

// Field names are part of the format. p_quantum_t, when given, records the
// finite-time average diag(avg_density) alongside the infinite-time fields.
std::string walk_report_to_json(const WalkReport& r,
                                const Eigen::VectorXd* p_quantum_t = nullptr);

}  // namespace qwalk
