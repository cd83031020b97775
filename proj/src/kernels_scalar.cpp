#include "dipg/kernels.hpp"

namespace dipg::kern {
namespace {

double dot_s(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_s(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_s(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matvec_s(const double* a, std::size_t m, std::size_t n, const double* x,
              double* y) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_t_s(const double* a, std::size_t m, std::size_t n, const double* x,
                double* y) {
    for (std::size_t j = 0; j < n; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a + i * n;
        const double xi = x[i];
        for (std::size_t j = 0; j < n; ++j) y[j] += xi * row[j];
    }
}

void ger_s(double* a, std::size_t m, std::size_t n, double alpha,
           const double* u, const double* v) {
    for (std::size_t i = 0; i < m; ++i) {
        double* row = a + i * n;
        const double c = alpha * u[i];
        for (std::size_t j = 0; j < n; ++j) row[j] += c * v[j];
    }
}

void leaky_s(const double* in, double* out, std::size_t n, double slope) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = in[i];
        out[i] = t >= 0.0 ? t : slope * t;
    }
}

void leaky_mask_s(const double* pre, const double* in, double* out,
                  std::size_t n, double slope) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = in[i] * (pre[i] >= 0.0 ? 1.0 : slope);
}

void heat_step_s(const double* in, double* out, std::size_t n, double r) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    out[0] = in[0] + r * (in[1] - in[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = in[i] + r * (in[i - 1] - 2.0 * in[i] + in[i + 1]);
    out[n - 1] = in[n - 1] + r * (in[n - 2] - in[n - 1]);
}

const Kernels table = {dot_s,   axpy_s,       scal_s,      matvec_s,
                       matvec_t_s, ger_s,     leaky_s,     leaky_mask_s,
                       heat_step_s, "scalar"};

}  // namespace

const Kernels& scalar() { return table; }

}  // namespace dipg::kern
