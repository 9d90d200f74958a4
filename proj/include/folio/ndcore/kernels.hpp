#pragma once

#include <cstddef>

// Inner-loop kernels behind the tensor graph. A scalar reference table is
// always available; an AVX2 table is selected at process start on x86-64
// hosts that support it. Elementwise kernels are bit-identical across
// backends; reduction kernels (dot) may differ by summation order and are
// equivalence-tested against the scalar reference within tight tolerance.
//
// The AVX2 kernels deliberately avoid FMA so that per-lane arithmetic
// matches the scalar reference operation for operation.

namespace folio::nd::kernels {

struct KernelTable {
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[i] = a[i] <op> b[i]
    void (*add)(const double* a, const double* b, double* out, std::size_t n);
    void (*sub)(const double* a, const double* b, double* out, std::size_t n);
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    // out[i] = alpha * a[i]
    void (*scale)(double alpha, const double* a, double* out, std::size_t n);
    void (*relu)(const double* x, double* out, std::size_t n);
    // dx[i] = x[i] > 0 ? dy[i] : 0, accumulated into dx
    void (*relu_backward)(const double* x, const double* dy, double* dx, std::size_t n);
    // Bias-corrected Adam update on one parameter block.
    // minimize: p -= lr * mhat / (sqrt(vhat) + eps); maximize flips the sign.
    void (*adam_update)(double* p, const double* g, double* m, double* v, std::size_t n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2, int direction);
    void (*sgd_update)(double* p, const double* g, std::size_t n, double lr, int direction);
};

enum class Backend { Auto, Scalar, Avx2 };

const KernelTable& scalar_table();

// Table chosen by the active backend. Resolved once; stable for the
// lifetime of the process unless set_backend is called (tests only).
const KernelTable& active();

// Force a backend. Avx2 on a host without AVX2 support falls back to
// scalar. Returns the table now active.
const KernelTable& set_backend(Backend b);

bool avx2_available();

} // namespace folio::nd::kernels
