// Regenerates the bundled JSON fixtures in data/. Run from the repo root:
//   build/make_fixtures data
#include <fstream>
#include <iostream>
#include <string>

#include "qwalk/fixtures.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/spectral.hpp"

namespace {

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        std::cerr << "cannot open " << path << "\n";
        std::exit(1);
    }
    f << body;
    std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data";
    using namespace qwalk;
    write_file(dir + "/two_triangles.json", graph_to_json(make_two_triangles()));
    write_file(dir + "/toy_coherent.json",
               hamiltonian_to_json(make_toy_hamiltonian(ToyPhases::coherent)));
    write_file(dir + "/toy_canceling.json",
               hamiltonian_to_json(make_toy_hamiltonian(ToyPhases::canceling)));
    write_file(dir + "/toy_random.json",
               hamiltonian_to_json(make_toy_hamiltonian(ToyPhases::random, 42)));
    return 0;
}
