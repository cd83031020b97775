#pragma once

// Small dense row-major matrices and vector helpers on std::vector<double>.
// Everything routes through the dispatched kernels; shapes here are at most
// a few hundred, so no blocking or sparsity.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dipg/kernels.hpp"

namespace dipg {

using Vec = std::vector<double>;

struct Mat {
    std::size_t rows = 0, cols = 0;
    Vec a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
    double* data() { return a.data(); }
    const double* data() const { return a.data(); }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline double dot(const Vec& x, const Vec& y) {
    return kern::dot(x.data(), y.data(), x.size());
}

double nrm2(const Vec& x);

inline void axpy(double alpha, const Vec& x, Vec& y) {
    kern::axpy(alpha, x.data(), y.data(), x.size());
}

inline void scal(double alpha, Vec& x) { kern::scal(alpha, x.data(), x.size()); }

// y = A x
inline Vec matvec(const Mat& A, const Vec& x) {
    if (x.size() != A.cols) throw std::invalid_argument("matvec: shape mismatch");
    Vec y(A.rows);
    kern::matvec(A.data(), A.rows, A.cols, x.data(), y.data());
    return y;
}

// y = A^T x
inline Vec matvec_t(const Mat& A, const Vec& x) {
    if (x.size() != A.rows) throw std::invalid_argument("matvec_t: shape mismatch");
    Vec y(A.cols);
    kern::matvec_t(A.data(), A.rows, A.cols, x.data(), y.data());
    return y;
}

Mat matmul(const Mat& A, const Mat& B);
Mat transpose(const Mat& A);

// ||A - I||_F^2 for square A
double frob2_minus_identity(const Mat& A);

// Singular values by one-sided Jacobi, descending. Max dimension 256.
Vec svd_values(const Mat& M);

// Solve S x = b for symmetric positive definite S (Cholesky, in-place copy).
Vec solve_spd(const Mat& S, const Vec& b);

// Least-squares solution of J z = r via the normal equations (J full column
// rank; sizes here are tiny).
Vec lstsq(const Mat& J, const Vec& r);

}  // namespace dipg
