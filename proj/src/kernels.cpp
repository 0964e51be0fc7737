#include "qwalk/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "qwalk/errors.hpp"

namespace qwalk::kernels {

namespace ref {

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
        // Re(w * a * conj(b)) expanded to avoid temporaries.
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

}  // namespace ref

namespace avx2 {
// Defined in kernels_avx2.cpp (compiled with -mavx2 -mfma).
bool supported();
void abs2(double* out, const cd* a, std::size_t n);
void acc_abs2(double* out, const cd* a, std::size_t n);
void acc_cross(double* out, const cd* a, const cd* b, cd w, std::size_t n);
double sum_abs2(const cd* a, std::size_t n);
}  // namespace avx2

namespace {

struct Table {
    void (*abs2)(double*, const cd*, std::size_t);
    void (*acc_abs2)(double*, const cd*, std::size_t);
    void (*acc_cross)(double*, const cd*, const cd*, cd, std::size_t);
    double (*sum_abs2)(const cd*, std::size_t);
    const char* name;
};

constexpr Table kScalar{ref::abs2, ref::acc_abs2, ref::acc_cross, ref::sum_abs2, "scalar"};
constexpr Table kAvx2{avx2::abs2, avx2::acc_abs2, avx2::acc_cross, avx2::sum_abs2, "avx2"};

const Table* pick(const std::string& name) {
    if (name == "scalar") return &kScalar;
    if (name == "avx2") {
        if (!avx2::supported())
            throw ValidationError("kernels: avx2 requested but not supported by this CPU");
        return &kAvx2;
    }
    if (name == "auto") return avx2::supported() ? &kAvx2 : &kScalar;
    throw ValidationError("kernels: unknown backend '" + name + "'");
}

std::atomic<const Table*> g_table{nullptr};

const Table& table() {
    const Table* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        const char* env = std::getenv("QWALK_KERNELS");
        t = pick(env ? env : "auto");
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

}  // namespace

void abs2(double* out, const cd* a, std::size_t n) { table().abs2(out, a, n); }
void acc_abs2(double* out, const cd* a, std::size_t n) { table().acc_abs2(out, a, n); }
void acc_cross(double* out, const cd* a, const cd* b, cd w, std::size_t n) {
    table().acc_cross(out, a, b, w, n);
}
double sum_abs2(const cd* a, std::size_t n) { return table().sum_abs2(a, n); }

std::string backend_name() { return table().name; }

void force_backend(const std::string& name) {
    g_table.store(pick(name), std::memory_order_release);
}

}  // namespace qwalk::kernels
