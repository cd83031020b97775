#pragma once

// Double-precision compute kernels behind the dense linear algebra and the
// Heat-1D stencil. Every kernel has a scalar reference implementation and,
// where the target CPU supports it, a SIMD variant (AVX2+FMA on x86-64,
// NEON on aarch64). The active backend is chosen once at startup and can be
// overridden with the DIPG_KERNELS environment variable
// ("scalar", "avx2", "neon").
//
// Matrices are dense row-major. SIMD and scalar variants may differ in the
// last bits (different accumulation order); equivalence tests bound the
// relative difference.

#include <cstddef>
#include <string_view>

namespace dipg::kern {

struct Kernels {
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scal)(double alpha, double* x, std::size_t n);
    // y = A x, A row-major m x n
    void (*matvec)(const double* a, std::size_t m, std::size_t n,
                   const double* x, double* y);
    // y = A^T x, A row-major m x n, y length n
    void (*matvec_t)(const double* a, std::size_t m, std::size_t n,
                     const double* x, double* y);
    // A += alpha * u v^T (rank-1 update), A row-major m x n
    void (*ger)(double* a, std::size_t m, std::size_t n, double alpha,
                const double* u, const double* v);
    // out[i] = t >= 0 ? t : slope*t  with t = in[i]
    void (*leaky)(const double* in, double* out, std::size_t n, double slope);
    // out[i] = in[i] * (pre[i] >= 0 ? 1 : slope)   (activation mask product)
    void (*leaky_mask)(const double* pre, const double* in, double* out,
                       std::size_t n, double slope);
    // one explicit-Euler diffusion step with insulated (Neumann) ends:
    // out[i] = in[i] + r*(in[i-1] - 2 in[i] + in[i+1]), ghost cells mirrored
    void (*heat_step)(const double* in, double* out, std::size_t n, double r);

    const char* name;
};

// Reference implementation, always available (used by equivalence tests).
const Kernels& scalar();

#if defined(DIPG_BUILD_AVX2)
const Kernels& avx2();
#endif
#if defined(DIPG_BUILD_NEON)
const Kernels& neon();
#endif

// Backend selected at startup (env override, else best supported).
const Kernels& active();

// Forwarding helpers so call sites stay terse.
inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
inline void scal(double alpha, double* x, std::size_t n) {
    active().scal(alpha, x, n);
}
inline void matvec(const double* a, std::size_t m, std::size_t n,
                   const double* x, double* y) {
    active().matvec(a, m, n, x, y);
}
inline void matvec_t(const double* a, std::size_t m, std::size_t n,
                     const double* x, double* y) {
    active().matvec_t(a, m, n, x, y);
}
inline void ger(double* a, std::size_t m, std::size_t n, double alpha,
                const double* u, const double* v) {
    active().ger(a, m, n, alpha, u, v);
}
inline void leaky(const double* in, double* out, std::size_t n, double slope) {
    active().leaky(in, out, n, slope);
}
inline void leaky_mask(const double* pre, const double* in, double* out,
                       std::size_t n, double slope) {
    active().leaky_mask(pre, in, out, n, slope);
}
inline void heat_step(const double* in, double* out, std::size_t n, double r) {
    active().heat_step(in, out, n, r);
}

}  // namespace dipg::kern
