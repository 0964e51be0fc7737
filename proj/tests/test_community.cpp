#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qwalk/community.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/fixtures.hpp"
#include "qwalk/generators.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/metrics.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;
using cd = std::complex<double>;

namespace {

// Two unit triangles {0,1,2} and {3,4,5}; the second triangle's weights are
// scaled by w2, which detunes its spectrum from the first one's when w2 != 1.
Hamiltonian detuned_triangles(double w2) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(6, 6);
    const int tri[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& e : tri) {
        h(e[0], e[1]) = h(e[1], e[0]) = 1.0;
        h(e[0] + 3, e[1] + 3) = h(e[1] + 3, e[0] + 3) = w2;
    }
    return Hamiltonian::make(h);
}

Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
    return 0.5 * (m + m.adjoint().eval());
}

// Principal square root of a positive semidefinite Hermitian matrix.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

std::vector<int> canon(const Partition& p) {
    return Partition::from_labels(p.assignment).assignment;
}

}  // namespace

TEST_CASE("closeness kind names are stable") {
    CHECK(closeness_kind_name(ClosenessKind::transport_short) == "transport-short");
    CHECK(closeness_kind_name(ClosenessKind::transport_t) == "transport-t");
    CHECK(closeness_kind_name(ClosenessKind::transport_inf) == "transport-inf");
    CHECK(closeness_kind_name(ClosenessKind::fidelity_t) == "fidelity-t");
    CHECK(closeness_kind_name(ClosenessKind::fidelity_inf) == "fidelity-inf");
    CHECK(closeness_kind_name(ClosenessKind::purity_t) == "purity-t");
    CHECK(closeness_kind_name(ClosenessKind::purity_inf) == "purity-inf");
}

TEST_CASE("short-time transport closeness equals squared hopping magnitudes") {
    const Hamiltonian h = make_toy_hamiltonian(ToyPhases::coherent);
    const ClosenessMatrix c = closeness_transport_short(h);
    CHECK(c.kind == ClosenessKind::transport_short);
    REQUIRE(c.c.rows() == 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            const double want = i == j ? 0.0 : std::norm(h.matrix()(i, j));
            CHECK(c.c(i, j) == want);  // entries are 0 or exactly 1 here
        }

    // Hopping phases never enter: all three variants coincide.
    const ClosenessMatrix cc = closeness_transport_short(make_toy_hamiltonian(ToyPhases::canceling));
    const ClosenessMatrix cr =
        closeness_transport_short(make_toy_hamiltonian(ToyPhases::random, 9));
    CHECK((cc.c - c.c).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((cr.c - c.c).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("long-time transport closeness tracks interference across the bridges") {
    // Six-node toy: two triangles joined by four bridge edges. With aligned
    // bridge phases the walk interferes constructively between the two
    // non-bridged corners 0 and 5; opposing phases cancel that path exactly.
    const SpectralDecomposition dec =
        decompose(make_toy_hamiltonian(ToyPhases::coherent));
    const ClosenessMatrix c = closeness_transport(dec, TimeMode::inf());
    CHECK(c.kind == ClosenessKind::transport_inf);
    CHECK((c.c - c.c.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(c.c.diagonal().cwiseAbs().maxCoeff() == 0.0);

    CHECK(c.c(0, 5) == doctest::Approx(0.33006535947712395).epsilon(1e-9));
    const int nonadj[4][2] = {{0, 3}, {0, 4}, {1, 5}, {2, 5}};
    for (const auto& p : nonadj) {
        CHECK(c.c(p[0], p[1]) == doctest::Approx(0.08496732026143791).epsilon(1e-9));
        CHECK(c.c(0, 5) > c.c(p[0], p[1]) + 0.2);
    }

    const auto [part, q] = best_partition(agglomerate(c), c.c);
    CHECK(canon(part) == std::vector<int>{0, 1, 1, 2, 2, 0});
    CHECK(q == doctest::Approx(0.16299818867653837).epsilon(1e-7));

    const ClosenessMatrix ccanc = closeness_transport(
        decompose(make_toy_hamiltonian(ToyPhases::canceling)), TimeMode::inf());
    CHECK(std::abs(ccanc.c(0, 5)) <= 1e-10);
    CHECK(std::abs(ccanc.c(0, 3)) <= 1e-10);

    // Finite-time mode reports the matching kind tag.
    CHECK(closeness_transport(dec, TimeMode::at(2.0)).kind == ClosenessKind::transport_t);
}

TEST_CASE("disconnected triangles: zero transport closeness, positive fidelity closeness") {
    const Graph g = make_two_triangles();
    const SpectralDecomposition dec = decompose(adjacency_hamiltonian(g));

    const ClosenessMatrix ct = closeness_transport(dec, TimeMode::inf());
    for (int i = 0; i < 3; ++i)
        for (int j = 3; j < 6; ++j) CHECK(std::abs(ct.c(i, j)) <= 1e-10);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (i != j && i / 3 == j / 3)
                CHECK(ct.c(i, j) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

    const Dendrogram dt = agglomerate(ct);
    REQUIRE(dt.merges.size() == 3);
    CHECK(dt.merges[0].closeness == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(dt.merges[1].closeness == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(dt.merges[0].communities ==
          std::vector<std::vector<int>>{{0}, {1}, {2}});
    CHECK(dt.merges[1].communities ==
          std::vector<std::vector<int>>{{3}, {4}, {5}});
    CHECK(std::abs(dt.merges[2].closeness) <= 1e-10);

    const auto lv = dt.levels();
    REQUIRE(lv.size() == 4);
    CHECK(lv.front().k() == 6);
    CHECK(lv.back().k() == 1);
    for (std::size_t i = 1; i < lv.size(); ++i) CHECK(lv[i].k() < lv[i - 1].k());
    CHECK(lv[2].assignment == std::vector<int>{0, 0, 0, 1, 1, 1});

    const auto [pt, qt] = best_partition(dt, ct.c);
    CHECK(canon(pt) == std::vector<int>{0, 0, 0, 1, 1, 1});
    CHECK(qt == doctest::Approx(0.5).epsilon(1e-12));

    // Fidelity: the two identical triangles stay mutually coherent, so every
    // node pair, bridged or not, carries the same positive closeness and the
    // whole graph merges at once.
    const ClosenessMatrix cf = closeness_fidelity(dec, TimeMode::inf());
    CHECK(cf.kind == ClosenessKind::fidelity_inf);
    double cross_min = 1.0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            CHECK(cf.c(i, j) == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
            if (i / 3 != j / 3) cross_min = std::min(cross_min, cf.c(i, j));
        }
    CHECK(cross_min > 0.02);

    const Dendrogram df = agglomerate(cf);
    REQUIRE(df.merges.size() == 1);
    CHECK(df.merges[0].communities.size() == 6);
    CHECK(df.merges[0].closeness == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
    const auto [pf, qf] = best_partition(df, cf.c);
    CHECK(pf.k() == 1);
    CHECK(std::abs(qf) <= 1e-10);

    // Purity agrees qualitatively: cross-triangle terms stay positive.
    const ClosenessMatrix cp = closeness_purity(dec, TimeMode::inf());
    CHECK(cp.kind == ClosenessKind::purity_inf);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (i != j)
                CHECK(cp.c(i, j) == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
}

TEST_CASE("hamiltonian without hopping keeps the initial state's coherence") {
    // H = 2I: the evolved state never moves, the averaged density matrix is
    // the initial one, and every pair keeps closeness 1/n^2 (community form
    // 2/n^2 between singletons).
    const int n = 6;
    const Hamiltonian h =
        Hamiltonian::make(2.0 * Eigen::MatrixXcd::Identity(n, n));
    const SpectralDecomposition dec = decompose(h);
    for (const TimeMode tm : {TimeMode::inf(), TimeMode::at(3.1)}) {
        const ClosenessMatrix c = closeness_fidelity(dec, tm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j)
                    CHECK(c.c(i, j) == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
    }
    const Dendrogram d = agglomerate(closeness_fidelity(dec, TimeMode::inf()));
    REQUIRE(d.merges.size() == 1);
    CHECK(d.merges[0].closeness == doctest::Approx(2.0 / 36.0).epsilon(1e-12));
}

TEST_CASE("asymmetric detuning splits the fidelity communities at long times") {
    // Detuning one triangle's weights breaks the cross-block coherence on a
    // timescale ~ 1/detuning: long times resolve the two triangles, short
    // times do not.
    const Hamiltonian h = detuned_triangles(1.3);

    const SpectralDecomposition dec = decompose(h);
    const ClosenessMatrix clate = closeness_fidelity(dec, TimeMode::at(50.0));
    const auto [plate, qlate] = best_partition(agglomerate(clate), clate.c);
    CHECK(canon(plate) == std::vector<int>{0, 0, 0, 1, 1, 1});
    CHECK(qlate > 0.4);

    const ClosenessMatrix cearly = closeness_fidelity(dec, TimeMode::at(1.0));
    const auto [pearly, qearly] = best_partition(agglomerate(cearly), cearly.c);
    CHECK(pearly.k() == 1);

    const ClosenessMatrix cinf = closeness_fidelity(dec, TimeMode::inf());
    const auto [pinf, qinf] = best_partition(agglomerate(cinf), cinf.c);
    CHECK(canon(pinf) == std::vector<int>{0, 0, 0, 1, 1, 1});
    CHECK((cinf.c.block(0, 3, 3, 3)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("instantaneous purity closeness reproduces the measured-state purity") {
    const int n = 6;
    const Hamiltonian h = Hamiltonian::make(random_hermitian(n, 77));
    const SpectralDecomposition dec = decompose(h);
    const double t = 2.3;
    const ClosenessMatrix c = closeness_purity(dec, TimeMode::at(t));
    CHECK(c.kind == ClosenessKind::purity_t);
    CHECK(c.c.minCoeff() >= -1e-15);

    // rho(t) from the same decomposition.
    Eigen::VectorXcd ph(n);
    for (int k = 0; k < n; ++k)
        ph(k) = std::polar(1.0, -dec.eigenvalues(k) * t);
    const Eigen::MatrixXcd u =
        dec.eigenvectors * ph.asDiagonal() * dec.eigenvectors.adjoint();
    const Eigen::MatrixXcd rho0 = InitialState::uniform().density(n);
    const Eigen::MatrixXcd rho_t = u * rho0 * u.adjoint();

    // Measuring the community register of X = {{0,1},{2,3},{4,5}} leaves the
    // block-diagonal state rho_X; its purity decomposes into the diagonal
    // plus the intra-community closeness entries.
    const std::vector<std::vector<int>> comms = {{0, 1}, {2, 3}, {4, 5}};
    double purity_from_closeness = 0.0;
    for (int i = 0; i < n; ++i) purity_from_closeness += std::norm(rho_t(i, i));
    Eigen::MatrixXcd rho_x = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& comm : comms) {
        for (int a : comm)
            for (int b : comm) {
                rho_x(a, b) = rho_t(a, b);
                if (a != b) purity_from_closeness += c.c(a, b);
            }
    }
    const double purity_direct = (rho_x * rho_x).trace().real();
    CHECK(purity_from_closeness == doctest::Approx(purity_direct).epsilon(1e-10));

    // The global state is pure (rank 1), so this purity equals the squared
    // fidelity between the measured state and the unmeasured one, which for
    // a rank-1 second argument reduces to tr(rho_x rho_t).
    const double fid2_pure = (rho_x * rho_t).trace().real();
    CHECK(purity_from_closeness == doctest::Approx(fid2_pure).epsilon(1e-10));

    // The general matrix-square-root form agrees up to eigensolver noise.
    const Eigen::MatrixXcd s = psd_sqrt(rho_x);
    const Eigen::MatrixXcd inner = s * rho_t * s;
    const double fid = psd_sqrt(inner).trace().real();
    CHECK(purity_from_closeness == doctest::Approx(fid * fid).epsilon(1e-6));

    // At t = 0 the uniform state gives the flat closeness 1/n^2.
    const ClosenessMatrix c0 = closeness_purity(dec, TimeMode::at(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                CHECK(c0.c(i, j) == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
}

TEST_CASE("agglomeration merge rules") {
    SUBCASE("all-equal closeness merges everything in one step") {
        Eigen::MatrixXcd k4 = Eigen::MatrixXcd::Ones(4, 4);
        k4.diagonal().setZero();
        const ClosenessMatrix c = closeness_transport_short(Hamiltonian::make(k4));
        const Dendrogram d = agglomerate(c);
        REQUIRE(d.merges.size() == 1);
        CHECK(d.merges[0].communities.size() == 4);
        CHECK(d.merges[0].closeness == doctest::Approx(2.0).epsilon(1e-12));
        const auto lv = d.levels();
        REQUIRE(lv.size() == 2);
        CHECK(lv[0].k() == 4);
        CHECK(lv[1].k() == 1);
    }
    SUBCASE("single node yields an empty dendrogram") {
        ClosenessMatrix c{Eigen::MatrixXd::Zero(1, 1), ClosenessKind::transport_short};
        const Dendrogram d = agglomerate(c);
        CHECK(d.merges.empty());
        const auto lv = d.levels();
        REQUIRE(lv.size() == 1);
        CHECK(lv[0].k() == 1);
    }
    SUBCASE("degenerate inputs are rejected") {
        CHECK_THROWS_AS(
            agglomerate({Eigen::MatrixXd(0, 0), ClosenessKind::transport_short}),
            ValidationError);
        CHECK_THROWS_AS(
            agglomerate({Eigen::MatrixXd::Zero(2, 3), ClosenessKind::transport_short}),
            ValidationError);
    }
    SUBCASE("levels are valid partitions with decreasing community count") {
        const Graph g = gen_ba(12, 2, 31);
        const ClosenessMatrix c =
            closeness_transport(decompose(quantum_generator(g)), TimeMode::inf());
        const Dendrogram d = agglomerate(c);
        const auto lv = d.levels();
        CHECK(lv.front().k() == 12);
        CHECK(lv.back().k() == 1);
        for (std::size_t i = 0; i < lv.size(); ++i) {
            CHECK(lv[i].n() == 12);
            if (i > 0) CHECK(lv[i].k() < lv[i - 1].k());
            // Partition::make re-validates contiguity.
            CHECK_NOTHROW(Partition::make(canon(lv[i])));
        }
    }
}

TEST_CASE("modularity identities") {
    // Two unit triangles plus nothing else, as a plain adjacency matrix.
    Eigen::MatrixXd two_tri = Eigen::MatrixXd::Zero(6, 6);
    for (int b = 0; b < 6; b += 3)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) two_tri(b + i, b + j) = 1.0;

    const Partition split = Partition::make({0, 0, 0, 1, 1, 1});
    const Partition whole = Partition::make({0, 0, 0, 0, 0, 0});

    CHECK(modularity(two_tri, split) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(modularity(two_tri, whole)) <= 1e-14);
    CHECK(modularity(3.7 * two_tri, split) ==
          doctest::Approx(modularity(two_tri, split)).epsilon(1e-12));

    // Cross-check against the direct definition Q = (1/2m) sum_ij B_ij
    // delta(s_i, s_j), B = A - k k^T / 2m, on random non-negative matrices.
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> lab(0, 2);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 8;
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = uni(rng);
        a = 0.5 * (a + a.transpose().eval());
        a.diagonal().setZero();
        std::vector<int> labels(n);
        for (auto& l : labels) l = lab(rng);
        labels[0] = 0;
        labels[1] = 1;
        labels[2] = 2;  // all ids used
        const Partition p = Partition::from_labels(labels);
        const Eigen::VectorXd k = a.rowwise().sum();
        const double two_m = k.sum();
        const Eigen::MatrixXd b = a - k * k.transpose() / two_m;
        double q_direct = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (p.assignment[std::size_t(i)] == p.assignment[std::size_t(j)])
                    q_direct += b(i, j);
        q_direct /= two_m;
        const double q = modularity(a, p);
        CHECK(q == doctest::Approx(q_direct).epsilon(1e-12));
        CHECK(q < 1.0);
    }

    Eigen::MatrixXd neg = two_tri;
    neg(0, 1) = neg(1, 0) = -0.5;
    CHECK_THROWS_AS(modularity(neg, split), ValidationError);
    CHECK_THROWS_AS(modularity(Eigen::MatrixXd::Zero(6, 6), split), ValidationError);
    CHECK_THROWS_AS(modularity(two_tri, Partition::make({0, 1, 0, 1})), ValidationError);
    CHECK_THROWS_AS(modularity(Eigen::MatrixXd::Zero(2, 3), split), ValidationError);
}

TEST_CASE("signed modularity extends the plain form to negative weights") {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const Partition p = Partition::make({0, 0, 1, 1, 2, 2});
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::MatrixXd a(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) a(i, j) = uni(rng);
        a = 0.5 * (a + a.transpose().eval());
        a.diagonal().setZero();
        CHECK(signed_modularity(a, p) == doctest::Approx(modularity(a, p)).epsilon(1e-12));
        CHECK(signed_modularity(-a, p) ==
              doctest::Approx(-modularity(a, p)).epsilon(1e-12));
    }

    // Negative links inside the communities, positive links across them:
    // keeping the blocks together is as wrong as possible, Q < 0.
    Eigen::MatrixXd frustrated(4, 4);
    frustrated << 0, -1, 1, 1,
                 -1, 0, 1, 1,
                  1, 1, 0, -1,
                  1, 1, -1, 0;
    const Partition blocks = Partition::make({0, 0, 1, 1});
    CHECK(signed_modularity(frustrated, blocks) < 0.0);

    CHECK_THROWS_AS(signed_modularity(Eigen::MatrixXd::Zero(4, 4), blocks),
                    ValidationError);
}

TEST_CASE("frustration sums intra-community weight") {
    Eigen::MatrixXd two_tri = Eigen::MatrixXd::Zero(6, 6);
    for (int b = 0; b < 6; b += 3)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) two_tri(b + i, b + j) = 1.0;
    two_tri(0, 3) = two_tri(3, 0) = 2.0;  // one cross link

    const Partition split = Partition::make({0, 0, 0, 1, 1, 1});
    const Partition whole = Partition::make({0, 0, 0, 0, 0, 0});
    const Partition singles = Partition::make({0, 1, 2, 3, 4, 5});

    CHECK(frustration(two_tri, split) == doctest::Approx(-12.0).epsilon(1e-14));
    CHECK(frustration(two_tri, whole) == doctest::Approx(-16.0).epsilon(1e-14));
    CHECK(frustration(two_tri, singles) == 0.0);
    CHECK_THROWS_AS(frustration(two_tri, Partition::make({0, 1})), ValidationError);
}

TEST_CASE("partition construction and serialization") {
    const Partition p = Partition::make({0, 1, 0, 2});
    CHECK(p.n() == 4);
    CHECK(p.k() == 3);
    CHECK(p.communities() ==
          std::vector<std::vector<int>>{{0, 2}, {1}, {3}});

    CHECK_THROWS_AS(Partition::make({}), ValidationError);
    CHECK_THROWS_AS(Partition::make({0, -1}), ValidationError);
    CHECK_THROWS_AS(Partition::make({0, 2, 2}), ValidationError);

    CHECK(Partition::from_labels({5, 5, 3, 7}).assignment ==
          std::vector<int>{0, 0, 1, 2});

    const std::string js = partition_to_json(p);
    const Partition back = parse_partition_json(js);
    CHECK(back.assignment == p.assignment);
    CHECK(nlohmann::json::parse(js)["assignment"].size() == 4);

    CHECK_THROWS_AS(parse_partition_json("definitely not json"), ValidationError);
    CHECK_THROWS_AS(parse_partition_json("{\"foo\": 1}"), ValidationError);
    CHECK_THROWS_AS(parse_partition_json("{\"assignment\": [0, 1.5]}"), ValidationError);
    CHECK_THROWS_AS(parse_partition_json("{\"assignment\": [0, 2]}"), ValidationError);
    CHECK_THROWS_AS(load_partition("/nonexistent/partition.json"), ValidationError);
}

TEST_CASE("dendrogram serialization round trip") {
    const Graph g = make_two_triangles();
    const ClosenessMatrix c =
        closeness_transport(decompose(adjacency_hamiltonian(g)), TimeMode::inf());
    const Dendrogram d = agglomerate(c);
    const auto j = nlohmann::json::parse(dendrogram_to_json(d));
    REQUIRE(j.contains("merges"));
    REQUIRE(j["merges"].size() == d.merges.size());
    for (std::size_t i = 0; i < d.merges.size(); ++i) {
        const auto& rec = j["merges"][i];
        REQUIRE(rec.contains("communities"));
        REQUIRE(rec.contains("closeness"));
        CHECK(rec["communities"].get<std::vector<std::vector<int>>>() ==
              d.merges[i].communities);
        CHECK(rec["closeness"].get<double>() == d.merges[i].closeness);
    }
}

TEST_CASE("short-time partitions ignore hopping phases; long-time fidelity does not") {
    // Phase perturbations leave |H_ij| untouched, so the short-time closeness
    // and everything downstream of it are unchanged.
    const Graph g = gen_ba(20, 2, 11);
    const Hamiltonian h = quantum_generator(g);
    PhasePerturbSpec spec;
    spec.sigma = 0.8;
    spec.samples = 1;
    spec.seed = 3;
    const Hamiltonian hp = perturb_phases(h, spec).front();

    const ClosenessMatrix c0 = closeness_transport_short(h);
    const ClosenessMatrix c1 = closeness_transport_short(hp);
    CHECK((c0.c - c1.c).cwiseAbs().maxCoeff() <= 1e-12);
    const auto [p0, q0] = best_partition(agglomerate(c0), c0.c);
    const auto [p1, q1] = best_partition(agglomerate(c1), c1.c);
    CHECK(p0.assignment == p1.assignment);
    CHECK(q0 == doctest::Approx(q1).epsilon(1e-9));

    // Long-time fidelity structure depends on the bridge phases: aligned
    // phases keep one community, canceling phases split off the triangles.
    const ClosenessMatrix fcoh = closeness_fidelity(
        decompose(make_toy_hamiltonian(ToyPhases::coherent)), TimeMode::inf());
    const ClosenessMatrix fcanc = closeness_fidelity(
        decompose(make_toy_hamiltonian(ToyPhases::canceling)), TimeMode::inf());
    CHECK(fcanc.c.minCoeff() < -1e-3);  // genuinely signed closeness
    const auto [pcoh, qcoh] = best_partition(agglomerate(fcoh), fcoh.c);
    const auto [pcanc, qcanc] = best_partition(agglomerate(fcanc), fcanc.c);
    CHECK(pcoh.k() == 1);
    CHECK(canon(pcanc) == std::vector<int>{0, 0, 0, 1, 1, 1});
    CHECK(qcanc == doctest::Approx(0.336565).epsilon(1e-4));
    CHECK(nmi(pcoh, pcanc) < 1.0);
    CHECK(nmi(pcoh, pcanc) <= 1e-12);
}

TEST_CASE("random-phase averaged fidelity closeness") {
    const SpectralDecomposition dec =
        decompose(make_toy_hamiltonian(ToyPhases::coherent));
    const ClosenessMatrix a =
        closeness_fidelity_random_phases(dec, TimeMode::inf(), 4, 19);
    const ClosenessMatrix b =
        closeness_fidelity_random_phases(dec, TimeMode::inf(), 4, 19);
    CHECK(a.c == b.c);  // same seed, same average
    CHECK(a.kind == ClosenessKind::fidelity_inf);
    CHECK((a.c - a.c.transpose()).cwiseAbs().maxCoeff() <= 1e-14);

    const ClosenessMatrix zero = closeness_fidelity(dec, TimeMode::inf());
    CHECK((a.c - zero.c).cwiseAbs().maxCoeff() > 1e-3);

    CHECK_THROWS_AS(closeness_fidelity_random_phases(dec, TimeMode::inf(), 0, 19),
                    ValidationError);
}

TEST_CASE("best partition selection") {
    const Graph g = make_two_triangles();
    const ClosenessMatrix c =
        closeness_transport(decompose(adjacency_hamiltonian(g)), TimeMode::inf());
    const Dendrogram d = agglomerate(c);

    // Argmax is invariant under uniform scaling of the adjacency.
    const auto [p1, q1] = best_partition(d, c.c);
    const auto [p2, q2] = best_partition(d, 5.0 * c.c);
    CHECK(p1.assignment == p2.assignment);
    CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));
    CHECK(q1 >= 0.0);  // the one-community level always scores 0

    // Zero-weight adjacency: modularity is undefined everywhere, fall back to
    // the coarsest level.
    ClosenessMatrix lone{Eigen::MatrixXd::Zero(1, 1), ClosenessKind::transport_short};
    const auto [pl, ql] = best_partition(agglomerate(lone), lone.c);
    CHECK(pl.k() == 1);
    CHECK(ql == 0.0);
}
