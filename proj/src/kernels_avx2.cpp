#include "dipg/kernels.hpp"

#include <immintrin.h>

namespace dipg::kern {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_v(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_v(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_v(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void matvec_v(const double* a, std::size_t m, std::size_t n, const double* x,
              double* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] = dot_v(a + i * n, x, n);
}

void matvec_t_v(const double* a, std::size_t m, std::size_t n, const double* x,
                double* y) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) _mm256_storeu_pd(y + j, _mm256_setzero_pd());
    for (; j < n; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a + i * n;
        const __m256d vx = _mm256_set1_pd(x[i]);
        std::size_t k = 0;
        for (; k + 4 <= n; k += 4) {
            __m256d vy = _mm256_loadu_pd(y + k);
            vy = _mm256_fmadd_pd(vx, _mm256_loadu_pd(row + k), vy);
            _mm256_storeu_pd(y + k, vy);
        }
        for (; k < n; ++k) y[k] += x[i] * row[k];
    }
}

void ger_v(double* a, std::size_t m, std::size_t n, double alpha,
           const double* u, const double* v) {
    for (std::size_t i = 0; i < m; ++i) {
        double* row = a + i * n;
        const __m256d vc = _mm256_set1_pd(alpha * u[i]);
        std::size_t k = 0;
        for (; k + 4 <= n; k += 4) {
            __m256d vr = _mm256_loadu_pd(row + k);
            vr = _mm256_fmadd_pd(vc, _mm256_loadu_pd(v + k), vr);
            _mm256_storeu_pd(row + k, vr);
        }
        const double c = alpha * u[i];
        for (; k < n; ++k) row[k] += c * v[k];
    }
}

void leaky_v(const double* in, double* out, std::size_t n, double slope) {
    const __m256d vs = _mm256_set1_pd(slope);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_loadu_pd(in + i);
        const __m256d neg = _mm256_mul_pd(t, vs);
        const __m256d mask = _mm256_cmp_pd(t, zero, _CMP_GE_OQ);
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(neg, t, mask));
    }
    for (; i < n; ++i) {
        const double t = in[i];
        out[i] = t >= 0.0 ? t : slope * t;
    }
}

void leaky_mask_v(const double* pre, const double* in, double* out,
                  std::size_t n, double slope) {
    const __m256d vs = _mm256_set1_pd(slope);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d p = _mm256_loadu_pd(pre + i);
        const __m256d mask = _mm256_cmp_pd(p, zero, _CMP_GE_OQ);
        const __m256d d = _mm256_blendv_pd(vs, one, mask);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(d, _mm256_loadu_pd(in + i)));
    }
    for (; i < n; ++i) out[i] = in[i] * (pre[i] >= 0.0 ? 1.0 : slope);
}

void heat_step_v(const double* in, double* out, std::size_t n, double r) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    out[0] = in[0] + r * (in[1] - in[0]);
    const __m256d vr = _mm256_set1_pd(r);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        const __m256d c = _mm256_loadu_pd(in + i);
        const __m256d l = _mm256_loadu_pd(in + i - 1);
        const __m256d rt = _mm256_loadu_pd(in + i + 1);
        const __m256d lap = _mm256_add_pd(l, _mm256_fnmadd_pd(two, c, rt));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vr, lap, c));
    }
    for (; i + 1 < n; ++i)
        out[i] = in[i] + r * (in[i - 1] - 2.0 * in[i] + in[i + 1]);
    out[n - 1] = in[n - 1] + r * (in[n - 2] - in[n - 1]);
}

const Kernels table = {dot_v,   axpy_v,       scal_v,      matvec_v,
                       matvec_t_v, ger_v,     leaky_v,     leaky_mask_v,
                       heat_step_v, "avx2"};

}  // namespace

const Kernels& avx2() { return table; }

}  // namespace dipg::kern
