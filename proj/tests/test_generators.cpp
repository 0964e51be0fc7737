#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "qwalk/errors.hpp"
#include "qwalk/fixtures.hpp"
#include "qwalk/generators.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;

namespace {

std::set<std::pair<int, int>> edge_set(const Graph& g) {
    std::set<std::pair<int, int>> s;
    for (const auto& e : g.edges()) s.insert({e.i, e.j});
    return s;
}

Eigen::VectorXd raw_degrees(int n, const std::vector<Edge>& edges) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (const auto& e : edges) {
        d(e.i) += e.w;
        d(e.j) += e.w;
    }
    return d;
}

}  // namespace

TEST_CASE("substreams are deterministic and index-separated") {
    auto a1 = substream(123, 0), a2 = substream(123, 0);
    CHECK(a1() == a2());
    auto b = substream(123, 1);
    auto c = substream(124, 0);
    // Different index or seed gives a different stream head.
    const auto a3 = substream(123, 0)();
    CHECK(b() != a3);
    CHECK(c() != a3);
    CHECK(splitmix64_at(5, 7) == splitmix64_at(5, 7));
    CHECK(splitmix64_at(5, 7) != splitmix64_at(5, 8));
}

TEST_CASE("uniform edge sampler") {
    // n=3, m=3 leaves no choice.
    const Graph k3 = gen_er(3, 3, 11);
    CHECK(k3.n() == 3);
    CHECK(edge_set(k3) == std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

    // Exactly m raw edges, so mean degree is exactly 2m/n before extraction.
    auto rng = substream(42, 0);
    const auto raw = er_edges(500, 1500, rng);
    CHECK(raw.size() == 1500);
    CHECK(raw_degrees(500, raw).mean() == doctest::Approx(6.0).epsilon(1e-12));
    std::set<std::pair<int, int>> uniq;
    for (const auto& e : raw) {
        CHECK(e.i < e.j);
        uniq.insert({e.i, e.j});
    }
    CHECK(uniq.size() == raw.size());

    CHECK(edge_set(gen_er(40, 100, 9)) == edge_set(gen_er(40, 100, 9)));
    CHECK(edge_set(gen_er(40, 100, 9)) != edge_set(gen_er(40, 100, 10)));

    CHECK_THROWS_AS(gen_er(3, 0, 1), ValidationError);
    CHECK_THROWS_AS(gen_er(3, 4, 1), ValidationError);
}

TEST_CASE("ring-plus-shortcuts sampler") {
    // m = n adds nothing: plain cycle.
    const Graph cyc = gen_ws(6, 6, 3);
    CHECK(edge_set(cyc) == std::set<std::pair<int, int>>{
                               {0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});

    auto rng = substream(7, 0);
    const auto raw = ws_edges(500, 1500, rng);
    CHECK(raw.size() == 1500);
    const Graph g = gen_ws(500, 1500, 7);
    CHECK(g.n() == 500);  // ring keeps it connected, nothing dropped
    CHECK(g.edges().size() == 1500);

    CHECK_THROWS_AS(gen_ws(6, 5, 1), ValidationError);

    // Shortcut placement is uniform, so degrees stay far more homogeneous
    // than in the uniform sampler at the same size.
    double var_ws = 0.0, var_er = 0.0;
    const int reps = 50;
    for (int s = 0; s < reps; ++s) {
        auto r1 = substream(1000, std::uint64_t(s));
        auto r2 = substream(2000, std::uint64_t(s));
        const Eigen::VectorXd dw = raw_degrees(500, ws_edges(500, 1500, r1));
        const Eigen::VectorXd de = raw_degrees(500, er_edges(500, 1500, r2));
        var_ws += (dw.array() - dw.mean()).square().mean();
        var_er += (de.array() - de.mean()).square().mean();
    }
    CHECK(var_ws / reps <= var_er / reps);
}

TEST_CASE("proximity graph sampler") {
    const Graph tri = gen_rg(3, 3, 5);
    CHECK(tri.n() == 3);
    CHECK(tri.edges().size() == 3);

    auto rng = substream(8, 0);
    CHECK(rg_edges(500, 1500, rng).size() == 1500);

    CHECK(edge_set(gen_rg(60, 150, 21)) == edge_set(gen_rg(60, 150, 21)));
    CHECK_THROWS_AS(gen_rg(4, 7, 1), ValidationError);
}

TEST_CASE("preferential attachment sampler") {
    // n = m_attach + 1 is just the seed clique.
    const Graph k4 = gen_ba(4, 3, 2);
    CHECK(k4.n() == 4);
    CHECK(k4.edges().size() == 6);

    const Graph ba = gen_ba(500, 3, 17);
    CHECK(ba.n() == 500);
    CHECK(ba.edges().size() == 6 + 496 * 3);
    const double mean_deg = 2.0 * double(ba.edges().size()) / 500.0;
    CHECK(mean_deg == doctest::Approx(6.0).epsilon(0.01));

    CHECK_THROWS_AS(gen_ba(10, 1, 1), ValidationError);
    CHECK_THROWS_AS(gen_ba(3, 3, 1), ValidationError);

    // Degree tail: pooled histogram over seeds behaves like d^-3 on a
    // log-log fit through bins with enough mass.
    std::map<double, double> hist;
    const int reps = 100, n = 500, ma = 3;
    for (int s = 0; s < reps; ++s) {
        auto r = substream(31000, std::uint64_t(s));
        const Eigen::VectorXd d = raw_degrees(n, ba_edges(n, ma, r));
        for (int i = 0; i < n; ++i) hist[d(i)] += 1.0;
    }
    double sxx = 0, sxy = 0, sx = 0, sy = 0, cnt = 0;
    for (const auto& [deg, c] : hist) {
        if (deg < ma || c < 50.0) continue;  // tail bins with enough mass
        const double x = std::log(deg), y = std::log(c);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        cnt += 1.0;
    }
    REQUIRE(cnt >= 5);
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-3.0).epsilon(0.4 / 3.0));
}

TEST_CASE("planted-partition sampler") {
    const auto pp = gen_planted({15, 15, 15, 15}, 6.0 / 14.0, 0.02, 99);
    CHECK(pp.graph.n() == 60);
    CHECK(pp.partition.k() == 4);
    CHECK(pp.partition.assignment[0] == 0);
    CHECK(pp.partition.assignment[15] == 1);
    CHECK(pp.partition.assignment[59] == 3);

    // Zero inter probability: no cross-block edge appears.
    const auto iso = gen_planted({10, 10}, 0.8, 0.0, 5);
    for (const auto& e : iso.graph.edges())
        CHECK(iso.partition.assignment[std::size_t(e.i)] ==
              iso.partition.assignment[std::size_t(e.j)]);

    CHECK(edge_set(gen_planted({8, 8}, 0.5, 0.1, 3).graph) ==
          edge_set(gen_planted({8, 8}, 0.5, 0.1, 3).graph));

    CHECK_THROWS_AS(gen_planted({5, 0}, 0.5, 0.1, 1), ValidationError);
    CHECK_THROWS_AS(gen_planted({5, 5}, 1.5, 0.1, 1), ValidationError);
    CHECK_THROWS_AS(gen_planted({5, 5}, 0.5, -0.1, 1), ValidationError);
}

TEST_CASE("weight randomization drives quantumness toward the target") {
    // Regular graph sits at eps = 0 already.
    const Graph k3 = Graph::make(3, {{0, 1}, {0, 2}, {1, 2}});
    const auto at_zero = randomize_weights(k3, 0.0, 100, 1);
    CHECK(at_zero.converged);
    CHECK(at_zero.epsilon == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(edge_set(at_zero.graph) == edge_set(k3));

    // Target equal to the current value: nothing to do.
    const Graph star = Graph::make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    const double eps0 = quantumness_uniform_degree_form(star);
    const auto noop = randomize_weights(star, eps0, 100, 1);
    CHECK(noop.converged);
    CHECK(noop.epsilon == doctest::Approx(eps0).epsilon(1e-12));
    for (std::size_t k = 0; k < star.edges().size(); ++k)
        CHECK(noop.graph.edges()[k].w == star.edges()[k].w);

    // A real run: push a BA graph upward. Topology must be preserved.
    const Graph ba = gen_ba(100, 3, 7);
    const auto run = randomize_weights(ba, 0.35, 200000, 11);
    CHECK(run.converged);
    CHECK(std::abs(run.epsilon - 0.35) <= 0.01);
    CHECK(edge_set(run.graph) == edge_set(ba));
    for (const auto& e : run.graph.edges()) CHECK(e.w > 0.0);
    // Achieved value is recomputed from the returned graph, not accumulated.
    CHECK(run.epsilon ==
          doctest::Approx(quantumness_uniform_degree_form(run.graph)).epsilon(1e-12));

    CHECK_THROWS_AS(randomize_weights(k3, 1.0, 10, 1), ValidationError);
    CHECK_THROWS_AS(randomize_weights(k3, -0.1, 10, 1), ValidationError);
}

TEST_CASE("phase perturbation preserves magnitudes and hermiticity") {
    const Hamiltonian h = make_toy_hamiltonian(ToyPhases::random, 4);

    // sigma = 0 reproduces the input bit for bit.
    const auto same = perturb_phases(h, {0.0, 3, 9});
    REQUIRE(same.size() == 3);
    for (const auto& s : same) CHECK(s.matrix() == h.matrix());

    const auto out = perturb_phases(h, {0.7, 5, 9});
    REQUIRE(out.size() == 5);
    for (const auto& s : out) {
        const Eigen::MatrixXcd& m = s.matrix();
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <=
              1e-15 * h.matrix().cwiseAbs().maxCoeff());
        CHECK((m.cwiseAbs() - h.matrix().cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((m.diagonal() - h.matrix().diagonal()).cwiseAbs().maxCoeff() == 0.0);
    }

    // Same spec twice: identical samples. Different seed: different phases.
    const auto rep = perturb_phases(h, {0.7, 5, 9});
    for (std::size_t k = 0; k < rep.size(); ++k)
        CHECK(rep[k].matrix() == out[k].matrix());
    const auto other = perturb_phases(h, {0.7, 5, 10});
    CHECK(other[0].matrix() != out[0].matrix());

    CHECK_THROWS_AS(perturb_phases(h, {-0.1, 1, 1}), ValidationError);
    CHECK_THROWS_AS(perturb_phases(h, {0.5, 0, 1}), ValidationError);
}
