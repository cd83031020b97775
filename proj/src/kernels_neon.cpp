#include "dipg/kernels.hpp"

#include <arm_neon.h>

namespace dipg::kern {
namespace {

double dot_v(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    for (; i + 2 <= n; i += 2)
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_v(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_v(double alpha, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void matvec_v(const double* a, std::size_t m, std::size_t n, const double* x,
              double* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] = dot_v(a + i * n, x, n);
}

void matvec_t_v(const double* a, std::size_t m, std::size_t n, const double* x,
                double* y) {
    for (std::size_t j = 0; j < n; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a + i * n;
        const float64x2_t vx = vdupq_n_f64(x[i]);
        std::size_t k = 0;
        for (; k + 2 <= n; k += 2)
            vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), vx, vld1q_f64(row + k)));
        for (; k < n; ++k) y[k] += x[i] * row[k];
    }
}

void ger_v(double* a, std::size_t m, std::size_t n, double alpha,
           const double* u, const double* v) {
    for (std::size_t i = 0; i < m; ++i) {
        double* row = a + i * n;
        const double c = alpha * u[i];
        const float64x2_t vc = vdupq_n_f64(c);
        std::size_t k = 0;
        for (; k + 2 <= n; k += 2)
            vst1q_f64(row + k, vfmaq_f64(vld1q_f64(row + k), vc, vld1q_f64(v + k)));
        for (; k < n; ++k) row[k] += c * v[k];
    }
}

void leaky_v(const double* in, double* out, std::size_t n, double slope) {
    const float64x2_t vs = vdupq_n_f64(slope);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vld1q_f64(in + i);
        const uint64x2_t ge = vcgeq_f64(t, zero);
        vst1q_f64(out + i, vbslq_f64(ge, t, vmulq_f64(t, vs)));
    }
    for (; i < n; ++i) {
        const double t = in[i];
        out[i] = t >= 0.0 ? t : slope * t;
    }
}

void leaky_mask_v(const double* pre, const double* in, double* out,
                  std::size_t n, double slope) {
    const float64x2_t vs = vdupq_n_f64(slope);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const uint64x2_t ge = vcgeq_f64(vld1q_f64(pre + i), zero);
        const float64x2_t d = vbslq_f64(ge, one, vs);
        vst1q_f64(out + i, vmulq_f64(d, vld1q_f64(in + i)));
    }
    for (; i < n; ++i) out[i] = in[i] * (pre[i] >= 0.0 ? 1.0 : slope);
}

void heat_step_v(const double* in, double* out, std::size_t n, double r) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    out[0] = in[0] + r * (in[1] - in[0]);
    const float64x2_t vr = vdupq_n_f64(r);
    const float64x2_t two = vdupq_n_f64(2.0);
    std::size_t i = 1;
    for (; i + 2 < n; i += 2) {
        const float64x2_t c = vld1q_f64(in + i);
        const float64x2_t l = vld1q_f64(in + i - 1);
        const float64x2_t rt = vld1q_f64(in + i + 1);
        const float64x2_t lap = vaddq_f64(l, vfmsq_f64(rt, two, c));
        vst1q_f64(out + i, vfmaq_f64(c, vr, lap));
    }
    for (; i + 1 < n; ++i)
        out[i] = in[i] + r * (in[i - 1] - 2.0 * in[i] + in[i + 1]);
    out[n - 1] = in[n - 1] + r * (in[n - 2] - in[n - 1]);
}

const Kernels table = {dot_v,   axpy_v,       scal_v,      matvec_v,
                       matvec_t_v, ger_v,     leaky_v,     leaky_mask_v,
                       heat_step_v, "neon"};

}  // namespace

const Kernels& neon() { return table; }

}  // namespace dipg::kern
