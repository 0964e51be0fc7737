#include "qwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qwalk/errors.hpp"
#include "json_writer.hpp"

namespace qwalk {

using nlohmann::json;

Hamiltonian Hamiltonian::make(Eigen::MatrixXcd m) {
    if (m.rows() != m.cols()) throw ValidationError("hamiltonian: matrix not square");
    if (m.rows() == 0) throw ValidationError("hamiltonian: empty matrix");
    double maxabs = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const auto v = m(r, c);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw ValidationError("hamiltonian: non-finite entry at (" +
                                      std::to_string(r) + "," + std::to_string(c) + ")");
            maxabs = std::max(maxabs, std::abs(v));
        }
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12 * std::max(maxabs, 1e-300))
        throw ValidationError("hamiltonian: not Hermitian (max |H - H^dag| = " +
                              std::to_string(herm) + ")");
    Hamiltonian h;
    h.m_ = std::move(m);
    return h;
}

Hamiltonian adjacency_hamiltonian(const Graph& g) {
    return Hamiltonian::make(g.adjacency().cast<std::complex<double>>());
}

Eigen::MatrixXcd SpectralDecomposition::projector(int k) const {
    const auto& grp = groups.at(size_t(k));
    const auto block = eigenvectors.middleCols(grp.lo, grp.count);
    return block * block.adjoint();
}

double SpectralDecomposition::spectral_norm() const {
    if (eigenvalues.size() == 0) return 0.0;
    return std::max(std::abs(eigenvalues(0)), std::abs(eigenvalues(eigenvalues.size() - 1)));
}

SpectralDecomposition eig_hermitian(const Hamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    SpectralDecomposition dec;
    // Real symmetric input gets the cheaper real solver; projectors do not
    // depend on the (arbitrary) eigenvector phases, so the routes agree.
    if (h.matrix().imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rsolver(h.matrix().real());
        if (rsolver.info() != Eigen::Success)
            throw NumericalError("eigendecomposition failed to converge");
        dec.eigenvalues = rsolver.eigenvalues();
        dec.eigenvectors = rsolver.eigenvectors().cast<std::complex<double>>();
    } else {
        solver.compute(h.matrix());
        if (solver.info() != Eigen::Success)
            throw NumericalError("eigendecomposition failed to converge");
        dec.eigenvalues = solver.eigenvalues();
        dec.eigenvectors = solver.eigenvectors();
    }
    const double norm = std::max(dec.spectral_norm(), 1e-300);
    const double residual =
        (h.matrix() * dec.eigenvectors -
         dec.eigenvectors * dec.eigenvalues.asDiagonal().toDenseMatrix().cast<std::complex<double>>())
            .colwise()
            .norm()
            .maxCoeff();
    if (residual > 1e-10 * norm)
        throw NumericalError("eigendecomposition residual " + std::to_string(residual) +
                             " exceeds 1e-10 * ||H||");
    return dec;
}

double default_group_tol(const Eigen::VectorXd& eigenvalues) {
    if (eigenvalues.size() == 0) return 1e-8;
    return 1e-8 * (eigenvalues(eigenvalues.size() - 1) - eigenvalues(0) + 1.0);
}

SpectralDecomposition group_eigenspaces(SpectralDecomposition dec, double tol) {
    if (tol < 0.0) tol = default_group_tol(dec.eigenvalues);
    dec.groups.clear();
    const int n = dec.n();
    int lo = 0;
    while (lo < n) {
        int hi = lo + 1;
        while (hi < n && dec.eigenvalues(hi) - dec.eigenvalues(hi - 1) <= tol) ++hi;
        EigenGroup grp;
        grp.lo = lo;
        grp.count = hi - lo;
        grp.energy = dec.eigenvalues.segment(lo, grp.count).mean();
        dec.groups.push_back(grp);
        lo = hi;
    }
    return dec;
}

SpectralDecomposition decompose(const Hamiltonian& h, double tol) {
    return group_eigenspaces(eig_hermitian(h), tol);
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

Hamiltonian parse_hamiltonian_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("hamiltonian json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
        throw ValidationError("hamiltonian json: expected object with \"n\" and \"entries\"");
    if (!j["n"].is_number_integer())
        throw ValidationError("hamiltonian json: \"n\" must be an integer");
    const int n = j["n"].get<int>();
    if (n <= 0) throw ValidationError("hamiltonian json: n must be positive");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, n);
    for (const auto& row : j["entries"]) {
        if (!row.is_array() || row.size() != 4)
            throw ValidationError("hamiltonian json: entries must be [i, j, re, im]");
        if (!row[0].is_number_integer() || !row[1].is_number_integer())
            throw ValidationError("hamiltonian json: entry indices must be integers");
        const int i = row[0].get<int>();
        const int jj = row[1].get<int>();
        const double re = row[2].get<double>();
        const double im = row[3].get<double>();
        if (i < 0 || jj < 0 || i >= n || jj >= n)
            throw ValidationError("hamiltonian json: entry index out of range");
        if (i > jj)
            throw ValidationError("hamiltonian json: entries require i <= j, got (" +
                                  std::to_string(i) + "," + std::to_string(jj) + ")");
        if (i == jj && im != 0.0)
            throw ValidationError("hamiltonian json: diagonal entry (" + std::to_string(i) +
                                  ") must have zero imaginary part");
        if (seen(i, jj)++)
            throw ValidationError("hamiltonian json: duplicate entry (" + std::to_string(i) +
                                  "," + std::to_string(jj) + ")");
        m(i, jj) = {re, im};
        m(jj, i) = {re, -im};
    }
    return Hamiltonian::make(std::move(m));
}

Hamiltonian load_hamiltonian(const std::string& path) {
    return parse_hamiltonian_json(read_file(path));
}

std::string hamiltonian_to_json(const Hamiltonian& h) {
    JsonWriter w;
    w.begin_object();
    w.key("n");
    w.value(h.n());
    w.key("entries");
    w.begin_array();
    for (int i = 0; i < h.n(); ++i)
        for (int j = i; j < h.n(); ++j) {
            const auto v = h.matrix()(i, j);
            if (v == std::complex<double>(0.0, 0.0)) continue;
            w.begin_array(true);
            w.value(i);
            w.value(j);
            w.value(v.real());
            w.value(i == j ? 0.0 : v.imag());
            w.end_array();
        }
    w.end_array();
    w.end_object();
    return w.str();
}

}  // namespace qwalk
