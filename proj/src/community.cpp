#include "qwalk/community.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "qwalk/errors.hpp"
#include "qwalk/kernels.hpp"
#include "json_writer.hpp"

namespace qwalk {

using cd = std::complex<double>;
using nlohmann::json;

std::string closeness_kind_name(ClosenessKind kind) {
    switch (kind) {
        case ClosenessKind::transport_short: return "transport-short";
        case ClosenessKind::transport_t: return "transport-t";
        case ClosenessKind::transport_inf: return "transport-inf";
        case ClosenessKind::fidelity_t: return "fidelity-t";
        case ClosenessKind::fidelity_inf: return "fidelity-inf";
        case ClosenessKind::purity_t: return "purity-t";
        case ClosenessKind::purity_inf: return "purity-inf";
    }
    throw ValidationError("unknown closeness kind");
}

namespace {

void zero_diagonal_symmetrize(Eigen::MatrixXd& c) {
    c = 0.5 * (c + c.transpose().eval());
    c.diagonal().setZero();
}

}  // namespace

ClosenessMatrix closeness_transport_short(const Hamiltonian& h) {
    const int n = h.n();
    Eigen::MatrixXd c(n, n);
    kernels::abs2(c.data(), h.matrix().data(), std::size_t(n) * n);
    c.diagonal().setZero();
    return {std::move(c), ClosenessKind::transport_short};
}

ClosenessMatrix closeness_transport(const SpectralDecomposition& dec, TimeMode tm) {
    Eigen::MatrixXd c = avg_transfer_matrix(dec, tm);
    zero_diagonal_symmetrize(c);
    return {std::move(c), tm.infinite ? ClosenessKind::transport_inf
                                      : ClosenessKind::transport_t};
}

namespace {

ClosenessMatrix fidelity_for_state(const SpectralDecomposition& dec, TimeMode tm,
                                   const InitialState& rho0) {
    const int n = dec.n();
    const Eigen::MatrixXcd rho_init = rho0.density(n);
    const Eigen::MatrixXcd rho_avg = avg_density(dec, rho0, tm);
    // c_ij = Re(rho_avg_ij rho_ji(0)): the pairwise fidelity gain from keeping
    // i and j in one community.
    Eigen::MatrixXd c =
        rho_avg.cwiseProduct(rho_init.transpose()).real();
    zero_diagonal_symmetrize(c);
    return {std::move(c),
            tm.infinite ? ClosenessKind::fidelity_inf : ClosenessKind::fidelity_t};
}

}  // namespace

ClosenessMatrix closeness_fidelity(const SpectralDecomposition& dec, TimeMode tm) {
    return fidelity_for_state(dec, tm, InitialState::uniform());
}

ClosenessMatrix closeness_fidelity_random_phases(const SpectralDecomposition& dec,
                                                 TimeMode tm, int samples,
                                                 std::uint64_t seed) {
    if (samples < 1) throw ValidationError("fidelity closeness: samples must be >= 1");
    const int n = dec.n();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd thetas(n);
        for (int k = 0; k < n; ++k) thetas(k) = uni(rng);
        acc += fidelity_for_state(dec, tm, InitialState::phased_superposition(thetas)).c;
    }
    acc /= double(samples);
    return {std::move(acc),
            tm.infinite ? ClosenessKind::fidelity_inf : ClosenessKind::fidelity_t};
}

ClosenessMatrix closeness_purity(const SpectralDecomposition& dec, TimeMode tm) {
    const int n = dec.n();
    const std::size_t n2 = std::size_t(n) * n;
    const InitialState rho0 = InitialState::uniform();
    Eigen::MatrixXd c(n, n);
    if (!tm.infinite) {
        // Instantaneous: rho(t) = U rho(0) U^dag.
        Eigen::VectorXcd phases(n);
        for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, -dec.eigenvalues(k) * tm.t);
        const Eigen::MatrixXcd u =
            dec.eigenvectors * phases.asDiagonal() * dec.eigenvectors.adjoint();
        const Eigen::MatrixXcd rho_t = u * rho0.density(n) * u.adjoint();
        kernels::abs2(c.data(), rho_t.data(), n2);
    } else {
        // Long-time average of |rho_ab(t)|^2: the stationary part interferes
        // coherently, the oscillating cross-eigenspace parts add up
        // incoherently.
        if (!dec.grouped())
            throw ValidationError("spectral decomposition has no eigenspace groups; run decompose");
        const int ng = int(dec.groups.size());
        const Eigen::MatrixXcd rho = rho0.density(n);
        const Eigen::MatrixXcd w = dec.eigenvectors.adjoint() * rho * dec.eigenvectors;
        std::vector<Eigen::MatrixXcd> lrho(ng);  // L_j rho in the node basis, split by column group
        for (int j = 0; j < ng; ++j) {
            const auto& gj = dec.groups[j];
            lrho[j] = dec.eigenvectors.middleCols(gj.lo, gj.count) *
                      w.middleRows(gj.lo, gj.count);
        }
        const Eigen::MatrixXcd stationary = avg_density(dec, rho0, TimeMode::inf());
        kernels::abs2(c.data(), stationary.data(), n2);
        for (int j = 0; j < ng; ++j)
            for (int k = 0; k < ng; ++k) {
                if (j == k) continue;
                const auto& gk = dec.groups[k];
                const Eigen::MatrixXcd term =
                    lrho[j].middleCols(gk.lo, gk.count) *
                    dec.eigenvectors.middleCols(gk.lo, gk.count).adjoint();
                kernels::acc_abs2(c.data(), term.data(), n2);
            }
    }
    zero_diagonal_symmetrize(c);
    return {std::move(c), tm.infinite ? ClosenessKind::purity_inf : ClosenessKind::purity_t};
}

Partition Partition::make(std::vector<int> assignment) {
    if (assignment.empty()) throw ValidationError("partition: empty assignment");
    const int k = *std::max_element(assignment.begin(), assignment.end()) + 1;
    if (k > int(assignment.size()))
        throw ValidationError("partition: community ids must be contiguous 0..k-1");
    std::vector<char> used(size_t(std::max(k, 1)), 0);
    for (int a : assignment) {
        if (a < 0) throw ValidationError("partition: negative community id");
        used[size_t(a)] = 1;
    }
    if (!std::all_of(used.begin(), used.end(), [](char c) { return c; }))
        throw ValidationError("partition: community ids must be contiguous 0..k-1");
    Partition p;
    p.assignment = std::move(assignment);
    return p;
}

Partition Partition::from_labels(const std::vector<int>& labels) {
    std::vector<int> canon(labels.size());
    std::unordered_map<int, int> remap;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, fresh] = remap.try_emplace(labels[i], int(remap.size()));
        canon[i] = it->second;
        (void)fresh;
    }
    Partition p;
    p.assignment = std::move(canon);
    return p;
}

int Partition::k() const {
    return assignment.empty()
               ? 0
               : *std::max_element(assignment.begin(), assignment.end()) + 1;
}

std::vector<std::vector<int>> Partition::communities() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k()));
    for (int i = 0; i < n(); ++i) out[size_t(assignment[size_t(i)])].push_back(i);
    return out;
}

Partition parse_partition_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("partition json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("assignment") || !j["assignment"].is_array())
        throw ValidationError("partition json: expected object with \"assignment\" array");
    std::vector<int> a;
    for (const auto& v : j["assignment"]) {
        if (!v.is_number_integer())
            throw ValidationError("partition json: assignment entries must be integers");
        a.push_back(v.get<int>());
    }
    return Partition::make(std::move(a));
}

Partition load_partition(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_partition_json(ss.str());
}

std::string partition_to_json(const Partition& p) {
    JsonWriter w;
    w.begin_object();
    w.key("assignment");
    w.begin_array(true);
    for (int a : p.assignment) w.value(a);
    w.end_array();
    w.end_object();
    return w.str();
}

std::vector<Partition> Dendrogram::levels() const {
    std::vector<Partition> out;
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    out.push_back(Partition::from_labels(labels));
    for (const auto& rec : merges) {
        const int target = labels[size_t(rec.communities.front().front())];
        for (const auto& comm : rec.communities)
            for (int node : comm) labels[size_t(node)] = target;
        out.push_back(Partition::from_labels(labels));
    }
    return out;
}

std::string dendrogram_to_json(const Dendrogram& d) {
    JsonWriter w;
    w.begin_object();
    w.key("merges");
    w.begin_array();
    for (const auto& rec : d.merges) {
        w.begin_object();
        w.key("communities");
        w.begin_array();
        for (const auto& comm : rec.communities) {
            w.begin_array(true);
            for (int node : comm) w.value(node);
            w.end_array();
        }
        w.end_array();
        w.key("closeness");
        w.value(rec.closeness);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

namespace {

struct MergeUnionFind {
    std::vector<int> parent;
    explicit MergeUnionFind(int n) : parent(size_t(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[size_t(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

Dendrogram agglomerate(const ClosenessMatrix& base) {
    const int n = int(base.c.rows());
    if (n < 1) throw ValidationError("agglomerate: empty closeness matrix");
    if (base.c.rows() != base.c.cols())
        throw ValidationError("agglomerate: closeness matrix not square");

    Dendrogram d;
    d.n = n;

    // Active community slots: member lists plus pairwise block sums, both
    // recomputed exactly on merge. Slot count only shrinks.
    std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) members[size_t(i)] = {i};
    Eigen::MatrixXd sums = base.c;  // sums(a, b) = sum of base over the block
    std::vector<int> alive(static_cast<std::size_t>(n));
    std::iota(alive.begin(), alive.end(), 0);

    while (alive.size() > 1) {
        const int na = int(alive.size());
        double best = -std::numeric_limits<double>::infinity();
        for (int ai = 0; ai < na; ++ai)
            for (int bi = ai + 1; bi < na; ++bi) {
                const int a = alive[size_t(ai)], b = alive[size_t(bi)];
                const double c = 2.0 * sums(a, b) /
                                 (double(members[size_t(a)].size()) *
                                  double(members[size_t(b)].size()));
                if (c > best) best = c;
            }
        const double thr = best - 1e-9 * std::abs(best);

        MergeUnionFind uf(n);
        for (int ai = 0; ai < na; ++ai)
            for (int bi = ai + 1; bi < na; ++bi) {
                const int a = alive[size_t(ai)], b = alive[size_t(bi)];
                const double c = 2.0 * sums(a, b) /
                                 (double(members[size_t(a)].size()) *
                                  double(members[size_t(b)].size()));
                if (c >= thr) uf.unite(a, b);
            }

        std::vector<std::vector<int>> clusters(static_cast<std::size_t>(n));
        for (int a : alive) clusters[size_t(uf.find(a))].push_back(a);

        std::vector<int> next_alive;
        for (int root = 0; root < n; ++root) {
            auto& cluster = clusters[size_t(root)];
            if (cluster.empty()) continue;
            if (cluster.size() == 1) {
                next_alive.push_back(cluster.front());
                continue;
            }
            MergeRecord rec;
            rec.closeness = best;
            for (int slot : cluster) rec.communities.push_back(members[size_t(slot)]);
            d.merges.push_back(std::move(rec));

            // Merge into the first slot: concatenate members, add block sums.
            const int keep = cluster.front();
            for (std::size_t idx = 1; idx < cluster.size(); ++idx) {
                const int drop = cluster[idx];
                auto& km = members[size_t(keep)];
                auto& dm = members[size_t(drop)];
                km.insert(km.end(), dm.begin(), dm.end());
                dm.clear();
                sums.row(keep) += sums.row(drop);
                sums.col(keep) += sums.col(drop);
            }
            std::sort(members[size_t(keep)].begin(), members[size_t(keep)].end());
            next_alive.push_back(keep);
        }
        std::sort(next_alive.begin(), next_alive.end());
        alive = std::move(next_alive);
    }
    return d;
}

namespace {

double modularity_nonneg(const Eigen::MatrixXd& adj, const Partition& p) {
    const int n = int(adj.rows());
    const Eigen::VectorXd k = adj.rowwise().sum() - adj.diagonal();
    const double two_m = k.sum();
    if (two_m <= 0.0) throw ValidationError("modularity: adjacency has zero total weight");
    const int nk = p.k();
    std::vector<double> k_comm(size_t(nk), 0.0);
    std::vector<double> s_in(size_t(nk), 0.0);
    for (int i = 0; i < n; ++i) k_comm[size_t(p.assignment[size_t(i)])] += k(i);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (p.assignment[size_t(i)] == p.assignment[size_t(j)])
                s_in[size_t(p.assignment[size_t(i)])] += adj(i, j);
        }
    double q = 0.0;
    for (int a = 0; a < nk; ++a) {
        const double frac = k_comm[size_t(a)] / two_m;
        q += s_in[size_t(a)] / two_m - frac * frac;
    }
    return q;
}

}  // namespace

double modularity(const Eigen::MatrixXd& adj, const Partition& p) {
    if (adj.rows() != adj.cols()) throw ValidationError("modularity: adjacency not square");
    if (int(adj.rows()) != p.n())
        throw ValidationError("modularity: partition length does not match adjacency");
    if (adj.minCoeff() < -1e-12)
        throw ValidationError("modularity: negative entries (use signed_modularity)");
    return modularity_nonneg(adj, p);
}

double signed_modularity(const Eigen::MatrixXd& adj, const Partition& p) {
    if (adj.rows() != adj.cols())
        throw ValidationError("signed modularity: adjacency not square");
    if (int(adj.rows()) != p.n())
        throw ValidationError("signed modularity: partition length does not match adjacency");
    const Eigen::MatrixXd pos = adj.cwiseMax(0.0);
    const Eigen::MatrixXd neg = (-adj).cwiseMax(0.0);
    const double two_m_pos = pos.sum() - pos.diagonal().sum();
    const double two_m_neg = neg.sum() - neg.diagonal().sum();
    if (two_m_pos <= 0.0 && two_m_neg <= 0.0)
        throw ValidationError("signed modularity: adjacency has zero total weight");
    double q = 0.0;
    if (two_m_pos > 0.0)
        q += two_m_pos / (two_m_pos + two_m_neg) * modularity_nonneg(pos, p);
    if (two_m_neg > 0.0)
        q -= two_m_neg / (two_m_pos + two_m_neg) * modularity_nonneg(neg, p);
    return q;
}

double frustration(const Eigen::MatrixXd& adj, const Partition& p) {
    if (int(adj.rows()) != p.n())
        throw ValidationError("frustration: partition length does not match adjacency");
    double intra = 0.0;
    const int n = p.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (p.assignment[size_t(i)] == p.assignment[size_t(j)]) intra += adj(i, j);
        }
    return -intra;
}

std::pair<Partition, double> best_partition(const Dendrogram& d, const Eigen::MatrixXd& adj) {
    const auto all = d.levels();
    // Degenerate adjacency (no weight at all): modularity is undefined at
    // every level, so return the coarsest partition with Q = 0.
    const double total =
        adj.cwiseAbs().sum() - adj.diagonal().cwiseAbs().sum();
    if (total <= 0.0) return {all.back(), 0.0};
    std::vector<double> q(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) q[i] = signed_modularity(adj, all[i]);
    const double best = *std::max_element(q.begin(), q.end());
    // Levels run from most to fewest communities; the last level within
    // tolerance of the maximum realizes the fewer-communities tie rule.
    std::size_t pick = 0;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (q[i] >= best - 1e-12) pick = i;
    return {all[pick], q[pick]};
}

}  // namespace qwalk
