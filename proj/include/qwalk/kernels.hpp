#pragma once

/*
 * Elementwise array kernels behind the spectral time-average accumulations.
 *
 * Every long-time formula in the walk/community layers reduces to a few
 * data-parallel passes over n^2 complex arrays: squared magnitudes of
 * projector entries, and real parts of weighted cross products between two
 * projectors. These are the hot loops, so each primitive has a scalar
 * reference implementation and an AVX2 variant; the active backend is chosen
 * once at runtime from cpuid and can be pinned via QWALK_KERNELS=scalar|avx2
 * (or force_backend) for equivalence testing.
 */

#include <complex>
#include <cstddef>
#include <string>

namespace qwalk::kernels {

using cd = std::complex<double>;

// out[i] = |a[i]|^2
void abs2(double* out, const cd* a, std::size_t n);

// out[i] += |a[i]|^2
void acc_abs2(double* out, const cd* a, std::size_t n);

// out[i] += Re(w * a[i] * conj(b[i]))
void acc_cross(double* out, const cd* a, const cd* b, cd w, std::size_t n);

// sum_i |a[i]|^2
double sum_abs2(const cd* a, std::size_t n);

// Name of the backend currently serving the primitives.
std::string backend_name();

// Pin a backend ("scalar", "avx2", "auto"). Throws ValidationError if the
// requested ISA is unavailable on this CPU. Intended for tests.
void force_backend(const std::string& name);

// Scalar reference implementations, always available (equivalence baseline).
namespace ref {
void abs2(double* out, const cd* a, std::size_t n);
void acc_abs2(double* out, const cd* a, std::size_t n);
void acc_cross(double* out, const cd* a, const cd* b, cd w, std::size_t n);
double sum_abs2(const cd* a, std::size_t n);
}  // namespace ref

}  // namespace qwalk::kernels
