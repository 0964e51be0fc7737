#include "qwalk/fixtures.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>

#include "qwalk/generators.hpp"

namespace qwalk {

Graph make_two_triangles() {
    return Graph::make(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
}

Graph make_toy_graph() {
    return Graph::make(6, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4},
                           {3, 4}, {3, 5}, {4, 5}});
}

Hamiltonian make_toy_hamiltonian(ToyPhases kind, std::uint64_t seed) {
    using cd = std::complex<double>;
    std::array<cd, 4> phase{cd(1, 0), cd(1, 0), cd(1, 0), cd(1, 0)};
    if (kind == ToyPhases::canceling) {
        phase[2] = cd(-1, 0);
        phase[3] = cd(-1, 0);
    } else if (kind == ToyPhases::random) {
        auto rng = substream(seed, 0);
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        for (auto& p : phase) {
            const double phi = u(rng);
            p = cd(std::cos(phi), std::sin(phi));
        }
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(6, 6);
    const Graph tri = make_two_triangles();
    for (const auto& e : tri.edges()) {
        m(e.i, e.j) = cd(1, 0);
        m(e.j, e.i) = cd(1, 0);
    }
    const std::array<std::pair<int, int>, 4> bridge{{{1, 3}, {1, 4}, {2, 3}, {2, 4}}};
    for (std::size_t k = 0; k < bridge.size(); ++k) {
        m(bridge[k].first, bridge[k].second) = phase[k];
        m(bridge[k].second, bridge[k].first) = std::conj(phase[k]);
    }
    return Hamiltonian::make(m);
}

}  // namespace qwalk
