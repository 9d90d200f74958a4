#include "folio/ndcore/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace folio::nd::kernels {

#if defined(__x86_64__)
// Defined in kernels_avx2.cpp, compiled with -mavx2.
const KernelTable& avx2_table_ptr();

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }
#else
bool avx2_available() { return false; }
#endif

namespace {

double s_dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double s_sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void s_axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_add(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void s_sub(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void s_mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void s_scale(double alpha, const double* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * a[i];
}

void s_relu(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void s_relu_backward(const double* x, const double* dy, double* dx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] > 0.0) dx[i] += dy[i];
}

void s_adam_update(double* p, const double* g, double* m, double* v, std::size_t n,
                   double lr, double beta1, double beta2, double eps,
                   double bc1, double bc2, int direction) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] += direction * lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

void s_sgd_update(double* p, const double* g, std::size_t n, double lr, int direction) {
    for (std::size_t i = 0; i < n; ++i) p[i] += direction * lr * g[i];
}

const KernelTable g_scalar = {
    "scalar", s_dot,  s_sum,  s_axpy,          s_add,         s_sub,
    s_mul,    s_scale, s_relu, s_relu_backward, s_adam_update, s_sgd_update,
};

const KernelTable* g_active = nullptr;

const KernelTable* resolve_default() {
#if defined(__x86_64__)
    const char* force = std::getenv("FOLIO_KERNELS");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) return &g_scalar;
    if (avx2_available()) return &avx2_table_ptr();
#endif
    return &g_scalar;
}

} // namespace

const KernelTable& scalar_table() { return g_scalar; }

const KernelTable& active() {
    if (g_active == nullptr) g_active = resolve_default();
    return *g_active;
}

const KernelTable& set_backend(Backend b) {
    switch (b) {
    case Backend::Auto:
        g_active = resolve_default();
        break;
    case Backend::Scalar:
        g_active = &g_scalar;
        break;
    case Backend::Avx2:
#if defined(__x86_64__)
        g_active = avx2_available() ? &avx2_table_ptr() : &g_scalar;
#else
        g_active = &g_scalar;
#endif
        break;
    }
    return *g_active;
}

} // namespace folio::nd::kernels
