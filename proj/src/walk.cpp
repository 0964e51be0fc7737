#include "qwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/kernels.hpp"
#include "json_writer.hpp"

namespace qwalk {

using cd = std::complex<double>;

TimeMode TimeMode::at(double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ValidationError("time must be finite and >= 0");
    return {false, t};
}

InitialState InitialState::uniform() {
    InitialState s;
    s.kind_ = Kind::uniform;
    return s;
}

InitialState InitialState::localized(int node) {
    if (node < 0) throw ValidationError("localized initial state: negative node index");
    InitialState s;
    s.kind_ = Kind::localized;
    s.node_ = node;
    return s;
}

InitialState InitialState::phased_superposition(Eigen::VectorXd thetas) {
    InitialState s;
    s.kind_ = Kind::uniform;
    s.thetas_ = std::move(thetas);
    return s;
}

InitialState InitialState::custom(Eigen::MatrixXcd rho) {
    validate_density(rho);
    InitialState s;
    s.kind_ = Kind::custom;
    s.rho_ = std::move(rho);
    return s;
}

void validate_density(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0)
        throw ValidationError("density matrix: not square");
    const double maxabs = std::max(rho.cwiseAbs().maxCoeff(), 1e-300);
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * maxabs)
        throw ValidationError("density matrix: not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-9 || std::abs(rho.trace().imag()) > 1e-9)
        throw ValidationError("density matrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw ValidationError("density matrix: not positive semidefinite");
}

Eigen::VectorXcd InitialState::amplitudes(int n) const {
    if (kind_ == Kind::custom)
        throw ValidationError("initial state is not pure");
    Eigen::VectorXcd psi(n);
    if (kind_ == Kind::localized) {
        if (node_ >= n)
            throw ValidationError("localized initial state: node " + std::to_string(node_) +
                                  " out of range for n=" + std::to_string(n));
        psi.setZero();
        psi(node_) = 1.0;
        return psi;
    }
    const double a = 1.0 / std::sqrt(double(n));
    if (thetas_.size() == 0) {
        psi.setConstant(a);
    } else {
        if (thetas_.size() != n)
            throw ValidationError("phased superposition: phase count != n");
        for (int k = 0; k < n; ++k) psi(k) = a * std::polar(1.0, thetas_(k));
    }
    return psi;
}

Eigen::MatrixXcd InitialState::density(int n) const {
    if (kind_ == Kind::custom) {
        if (rho_.rows() != n)
            throw ValidationError("custom initial state: dimension mismatch");
        return rho_;
    }
    const Eigen::VectorXcd psi = amplitudes(n);
    return psi * psi.adjoint();
}

Eigen::MatrixXd classical_generator(const Graph& g) {
    if (g.has_isolated_node())
        throw ValidationError("classical generator: graph has an isolated node");
    const Eigen::VectorXd d = g.degree_vector();
    return g.laplacian() * d.cwiseInverse().asDiagonal();
}

Hamiltonian quantum_generator(const Graph& g) {
    if (g.has_isolated_node())
        throw ValidationError("quantum generator: graph has an isolated node");
    const Eigen::VectorXd d = g.degree_vector();
    Eigen::MatrixXd hq = Eigen::MatrixXd::Zero(g.n(), g.n());
    hq.diagonal().setOnes();  // d_i / d_i, exact by construction
    for (const auto& e : g.edges()) {
        // One rounding per pair keeps the matrix exactly symmetric.
        const double v = -e.w / std::sqrt(d(e.i) * d(e.j));
        hq(e.i, e.j) = v;
        hq(e.j, e.i) = v;
    }
    return Hamiltonian::make(hq.cast<cd>());
}

Eigen::VectorXd stationary_classical(const Graph& g) {
    if (!g.connected())
        throw ValidationError(
            "stationary distribution requires a connected graph; extract the giant component");
    const Eigen::VectorXd d = g.degree_vector();
    return d / d.sum();
}

namespace {

void require_grouped(const SpectralDecomposition& dec) {
    if (!dec.grouped())
        throw ValidationError("spectral decomposition has no eigenspace groups; run decompose");
}

// Requires a one-dimensional lowest eigenspace; the graph-level cause is a
// disconnected graph.
void require_unique_ground(const SpectralDecomposition& dec, const char* what) {
    require_grouped(dec);
    if (dec.groups[0].count != 1)
        throw ValidationError(std::string(what) +
                              " requires a unique ground state, but the lowest eigenspace has "
                              "dimension " +
                              std::to_string(dec.groups[0].count) +
                              " (for graphs: extract the giant component first)");
}

// diag(L_k rho L_k) for every group k. Columns of the eigenvector matrix are
// rotated into the group basis once; no projector is materialized.
std::vector<Eigen::VectorXd> group_diag_contributions(const SpectralDecomposition& dec,
                                                      const InitialState& rho0) {
    require_grouped(dec);
    const int n = dec.n();
    std::vector<Eigen::VectorXd> out;
    out.reserve(dec.groups.size());
    if (rho0.pure()) {
        const Eigen::VectorXcd c = dec.eigenvectors.adjoint() * rho0.amplitudes(n);
        for (const auto& grp : dec.groups) {
            const Eigen::VectorXcd y =
                dec.eigenvectors.middleCols(grp.lo, grp.count) * c.segment(grp.lo, grp.count);
            out.push_back(y.cwiseAbs2());
        }
    } else {
        const Eigen::MatrixXcd w =
            dec.eigenvectors.adjoint() * rho0.density(n) * dec.eigenvectors;
        for (const auto& grp : dec.groups) {
            const auto vg = dec.eigenvectors.middleCols(grp.lo, grp.count);
            const Eigen::MatrixXcd m = vg * w.block(grp.lo, grp.lo, grp.count, grp.count);
            out.push_back(m.cwiseProduct(vg.conjugate()).rowwise().sum().real());
        }
    }
    return out;
}

double ground_weight(const SpectralDecomposition& dec, const InitialState& rho0) {
    const int n = dec.n();
    const Eigen::VectorXcd phi0 = dec.eigenvectors.col(0);
    if (rho0.pure()) {
        const cd overlap = phi0.adjoint() * rho0.amplitudes(n);
        return std::norm(overlap);
    }
    const cd w = phi0.adjoint() * (rho0.density(n) * phi0);
    return w.real();
}

}  // namespace

Eigen::VectorXd longtime_distribution(const SpectralDecomposition& dec,
                                      const InitialState& rho0) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dec.n());
    for (const auto& contrib : group_diag_contributions(dec, rho0)) p += contrib;
    return p;
}

double quantumness(const SpectralDecomposition& dec, const InitialState& rho0) {
    require_unique_ground(dec, "quantumness");
    return std::clamp(1.0 - ground_weight(dec, rho0), 0.0, 1.0);
}

double quantumness_uniform_degree_form(const Graph& g) {
    if (g.has_isolated_node())
        throw ValidationError("quantumness degree form: graph has an isolated node");
    const Eigen::VectorXd d = g.degree_vector();
    const double mean_d = d.mean();
    const double mean_sqrt = d.cwiseSqrt().mean();
    return 1.0 - mean_sqrt * mean_sqrt / mean_d;
}

Eigen::VectorXd quantum_correction(const SpectralDecomposition& dec,
                                   const InitialState& rho0) {
    require_unique_ground(dec, "quantum correction");
    const auto contribs = group_diag_contributions(dec, rho0);
    const double eps = std::clamp(1.0 - contribs[0].sum(), 0.0, 1.0);
    if (eps <= 1e-12)
        throw NumericalError(
            "no quantum correction: epsilon <= 1e-12 (the ground state carries the whole "
            "initial state)");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dec.n());
    for (std::size_t k = 1; k < contribs.size(); ++k) p += contribs[k];
    return p / eps;
}

EnergyGap energy_gap_bound(const SpectralDecomposition& dec, const InitialState& rho0) {
    require_unique_ground(dec, "energy/gap bound");
    if (dec.groups.size() < 2)
        throw ValidationError("energy/gap bound: spectrum has a single eigenspace (no gap)");
    const int n = dec.n();
    const double e0 = dec.groups[0].energy;
    double energy = 0.0;
    if (rho0.pure()) {
        const Eigen::VectorXcd c = dec.eigenvectors.adjoint() * rho0.amplitudes(n);
        for (int k = 0; k < n; ++k) energy += dec.eigenvalues(k) * std::norm(c(k));
    } else {
        const Eigen::MatrixXcd rho = rho0.density(n);
        for (int k = 0; k < n; ++k) {
            const cd w = dec.eigenvectors.col(k).adjoint() * (rho * dec.eigenvectors.col(k));
            energy += dec.eigenvalues(k) * w.real();
        }
    }
    EnergyGap r;
    r.energy = std::max(energy - e0, 0.0);
    r.gap = dec.groups[1].energy - e0;
    r.bound_ok = quantumness(dec, rho0) <= r.energy / r.gap + 1e-9;
    return r;
}

double entropy_bound(const Graph& g) {
    if (g.has_isolated_node())
        throw ValidationError("entropy bound: graph has an isolated node");
    const Eigen::VectorXd p = g.degree_vector() / g.degree_vector().sum();
    double h1 = 0.0;
    for (int i = 0; i < p.size(); ++i) h1 -= p(i) * std::log(p(i));
    return 1.0 - std::exp(h1) / double(g.n());
}

namespace {

// (1/t) int_0^t exp(-i dE s) ds. Equals 1 at dE = 0; the series branch avoids
// cancellation for |dE t| < 1e-6.
cd time_avg_kernel(double de, double t) {
    const double x = de * t;
    if (std::abs(x) < 1e-6) return {1.0 - x * x / 6.0, -x / 2.0};
    return {std::sin(x) / x, (std::cos(x) - 1.0) / x};
}

double entropy_bound_of(const Eigen::VectorXd& p) {
    double h1 = 0.0;
    for (int i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) h1 -= p(i) * std::log(p(i));
    return 1.0 - std::exp(h1) / double(p.size());
}

}  // namespace

Eigen::MatrixXd transfer_matrix(const SpectralDecomposition& dec, double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ValidationError("transfer matrix: time must be finite and >= 0");
    const int n = dec.n();
    Eigen::VectorXcd phases(n);
    for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, -dec.eigenvalues(k) * t);
    const Eigen::MatrixXcd u =
        dec.eigenvectors * phases.asDiagonal() * dec.eigenvectors.adjoint();
    Eigen::MatrixXd r(n, n);
    kernels::abs2(r.data(), u.data(), std::size_t(n) * n);
    return r;
}

Eigen::MatrixXd avg_transfer_matrix(const SpectralDecomposition& dec, TimeMode tm) {
    require_grouped(dec);
    const int n = dec.n();
    const std::size_t n2 = std::size_t(n) * n;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    if (tm.infinite) {
        for (int k = 0; k < int(dec.groups.size()); ++k) {
            const Eigen::MatrixXcd p = dec.projector(k);
            kernels::acc_abs2(out.data(), p.data(), n2);
        }
        return out;
    }
    const int ng = int(dec.groups.size());
    std::vector<Eigen::MatrixXcd> proj(ng);
    for (int k = 0; k < ng; ++k) proj[k] = dec.projector(k);
    for (int k = 0; k < ng; ++k) kernels::acc_abs2(out.data(), proj[k].data(), n2);
    for (int j = 0; j < ng; ++j)
        for (int k = j + 1; k < ng; ++k) {
            const cd w =
                2.0 * time_avg_kernel(dec.groups[j].energy - dec.groups[k].energy, tm.t);
            kernels::acc_cross(out.data(), proj[j].data(), proj[k].data(), w, n2);
        }
    return out;
}

Eigen::MatrixXcd avg_density(const SpectralDecomposition& dec, const InitialState& rho0,
                             TimeMode tm) {
    require_grouped(dec);
    const int n = dec.n();
    Eigen::MatrixXcd w = dec.eigenvectors.adjoint() * rho0.density(n) * dec.eigenvectors;
    const int ng = int(dec.groups.size());
    for (int j = 0; j < ng; ++j)
        for (int k = 0; k < ng; ++k) {
            if (j == k) continue;
            const auto& gj = dec.groups[j];
            const auto& gk = dec.groups[k];
            const cd f = tm.infinite
                             ? cd(0.0, 0.0)
                             : time_avg_kernel(gj.energy - gk.energy, tm.t);
            w.block(gj.lo, gk.lo, gj.count, gk.count) *= f;
        }
    Eigen::MatrixXcd rho = dec.eigenvectors * w * dec.eigenvectors.adjoint();
    return 0.5 * (rho + rho.adjoint().eval());
}

namespace {

WalkReport assemble_report(const SpectralDecomposition& dec, const InitialState& rho0,
                           Eigen::VectorXd p_classical, double bound) {
    WalkReport r;
    r.p_classical = std::move(p_classical);
    r.entropy_bound = bound;
    const auto contribs = group_diag_contributions(dec, rho0);
    r.epsilon = std::clamp(1.0 - contribs[0].sum(), 0.0, 1.0);
    r.p_quantum = Eigen::VectorXd::Zero(dec.n());
    for (const auto& c : contribs) r.p_quantum += c;
    if (r.epsilon > 1e-12) {
        r.quantum_correction = Eigen::VectorXd::Zero(dec.n());
        for (std::size_t k = 1; k < contribs.size(); ++k) r.quantum_correction += contribs[k];
        r.quantum_correction /= r.epsilon;
    } else {
        // Decomposition is degenerate at eps ~ 0; the classical term is the
        // whole distribution and any correction satisfies the identity.
        r.quantum_correction = r.p_classical;
    }
    const EnergyGap eg = energy_gap_bound(dec, rho0);
    r.energy = eg.energy;
    r.gap = eg.gap;
    return r;
}

}  // namespace

WalkReport make_walk_report(const Graph& g, const InitialState& rho0) {
    const SpectralDecomposition dec = decompose(quantum_generator(g));
    require_unique_ground(dec, "walk report");
    return assemble_report(dec, rho0, stationary_classical(g), entropy_bound(g));
}

WalkReport make_walk_report(const SpectralDecomposition& dec, const InitialState& rho0) {
    require_unique_ground(dec, "walk report");
    const Eigen::VectorXd pc = dec.eigenvectors.col(0).cwiseAbs2();
    return assemble_report(dec, rho0, pc, entropy_bound_of(pc));
}

std::string walk_report_to_json(const WalkReport& r, const Eigen::VectorXd* p_quantum_t) {
    JsonWriter w;
    w.begin_object();
    const auto vec = [&w](const char* name, const Eigen::VectorXd& v) {
        w.key(name);
        w.begin_array(true);
        for (int i = 0; i < v.size(); ++i) w.value(v(i));
        w.end_array();
    };
    vec("p_classical", r.p_classical);
    vec("p_quantum", r.p_quantum);
    vec("quantum_correction", r.quantum_correction);
    w.key("epsilon");
    w.value(r.epsilon);
    w.key("energy");
    w.value(r.energy);
    w.key("gap");
    w.value(r.gap);
    w.key("entropy_bound");
    w.value(r.entropy_bound);
    if (p_quantum_t) vec("p_quantum_t", *p_quantum_t);
    w.end_object();
    return w.str();
}

}  // namespace qwalk
