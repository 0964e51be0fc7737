#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Input or precondition violations: bad files, malformed matrices, infeasible
// parameters. CLI maps these to exit code 3.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: eigensolver non-convergence, cross-check mismatches,
// undefined quantities (e.g. quantum correction at epsilon ~ 0). Exit code 4.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qwalk
