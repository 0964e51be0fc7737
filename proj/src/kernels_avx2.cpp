// AVX2/FMA variants of the elementwise kernels. This translation unit is the
// only one built with -mavx2 -mfma; callers must gate on supported().

#include <cstddef>
#include <complex>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define QWALK_X86 1
#else
#define QWALK_X86 0
#endif

namespace qwalk::kernels::avx2 {

using cd = std::complex<double>;

bool supported() {
#if QWALK_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

#if QWALK_X86

namespace {
// Loads 4 complex doubles starting at a+i and returns |.|^2 of each as a
// packed vector ordered to match memory order.
inline __m256d abs2_block(const cd* a, std::size_t i) {
    const double* p = reinterpret_cast<const double*>(a + i);
    __m256d v0 = _mm256_loadu_pd(p);      // re0 im0 re1 im1
    __m256d v1 = _mm256_loadu_pd(p + 4);  // re2 im2 re3 im3
    __m256d s0 = _mm256_mul_pd(v0, v0);
    __m256d s1 = _mm256_mul_pd(v1, v1);
    // hadd keeps 128-bit lanes: [a0 a2 | a1 a3] after combining, fix with permute.
    __m256d h = _mm256_hadd_pd(s0, s1);                    // a0 a2 a1 a3 (lane-wise)
    return _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
}
}  // namespace

void abs2(double* out, const cd* a, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, abs2_block(a, i));
    for (; i < n; ++i)
        out[i] = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}

void acc_abs2(double* out, const cd* a, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_loadu_pd(out + i);
        _mm256_storeu_pd(out + i, _mm256_add_pd(acc, abs2_block(a, i)));
    }
    for (; i < n; ++i)
        out[i] += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}

void acc_cross(double* out, const cd* a, const cd* b, cd w, std::size_t n) {
    const double wr = w.real(), wi = w.imag();
    const __m256d vwr = _mm256_set1_pd(wr);
    const __m256d vwi = _mm256_set1_pd(wi);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double* pa = reinterpret_cast<const double*>(a + i);
        const double* pb = reinterpret_cast<const double*>(b + i);
        __m256d a0 = _mm256_loadu_pd(pa), a1 = _mm256_loadu_pd(pa + 4);
        __m256d b0 = _mm256_loadu_pd(pb), b1 = _mm256_loadu_pd(pb + 4);
        // pr = ar*br + ai*bi per element: multiply then pairwise add.
        __m256d pr01 = _mm256_hadd_pd(_mm256_mul_pd(a0, b0), _mm256_mul_pd(a1, b1));
        // pi = ai*br - ar*bi: multiply against swapped b, pairwise subtract.
        __m256d bs0 = _mm256_permute_pd(b0, 0x5);  // im re im re
        __m256d bs1 = _mm256_permute_pd(b1, 0x5);
        // a*bswap = [ar*bi, ai*br]; hsub gives ai*br - ar*bi ordered (hi-lo).
        __m256d m0 = _mm256_mul_pd(a0, bs0);
        __m256d m1 = _mm256_mul_pd(a1, bs1);
        __m256d pi01 = _mm256_hsub_pd(_mm256_permute_pd(m0, 0x5), _mm256_permute_pd(m1, 0x5));
        // hadd/hsub interleave lanes: reorder both to memory order.
        pr01 = _mm256_permute4x64_pd(pr01, _MM_SHUFFLE(3, 1, 2, 0));
        pi01 = _mm256_permute4x64_pd(pi01, _MM_SHUFFLE(3, 1, 2, 0));
        __m256d acc = _mm256_loadu_pd(out + i);
        acc = _mm256_fmadd_pd(vwr, pr01, acc);
        acc = _mm256_fnmadd_pd(vwi, pi01, acc);
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        const double pr = a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        const double pi = a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
        out[i] += wr * pr - wi * pi;
    }
}

double sum_abs2(const cd* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i)
        s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return s;
}

#else  // !QWALK_X86

void abs2(double* out, const cd* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}
void acc_abs2(double* out, const cd* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}
void acc_cross(double* out, const cd* a, const cd* b, cd w, std::size_t n) {
    const double wr = w.real(), wi = w.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double pr = a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        const double pi = a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
        out[i] += wr * pr - wi * pi;
    }
}
double sum_abs2(const cd* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return s;
}

#endif

}  // namespace qwalk::kernels::avx2
