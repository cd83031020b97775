#include "dipg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace dipg {

double nrm2(const Vec& x) {
    return std::sqrt(kern::dot(x.data(), x.data(), x.size()));
}

Mat matmul(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("matmul: shape mismatch");
    Mat C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* arow = A.row(i);
        double* crow = C.row(i);
        for (std::size_t k = 0; k < A.cols; ++k)
            kern::axpy(arow[k], B.row(k), crow, B.cols);
    }
    return C;
}

Mat transpose(const Mat& A) {
    Mat T(A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
    return T;
}

double frob2_minus_identity(const Mat& A) {
    if (A.rows != A.cols)
        throw std::invalid_argument("frob2_minus_identity: square matrix required");
    double acc = 0.0;
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) {
            const double d = A(i, j) - (i == j ? 1.0 : 0.0);
            acc += d * d;
        }
    return acc;
}

Vec svd_values(const Mat& M) {
    if (std::max(M.rows, M.cols) > 256)
        throw std::invalid_argument("svd_values: dimension above 256");
    // Work on a tall copy so the one-sided sweeps orthogonalize columns.
    Mat W = (M.rows >= M.cols) ? M : transpose(M);
    const std::size_t m = W.rows, n = W.cols;

    // Column-major access helper over the row-major store.
    auto coldot = [&](std::size_t p, std::size_t q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += W(i, p) * W(i, q);
        return acc;
    };

    const double eps = 1e-14;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = coldot(p, q);
                const double app = coldot(p, p);
                const double aqq = coldot(q, q);
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                off = std::max(off, std::abs(apq) / std::sqrt(app * aqq + 1e-300));
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = W(i, p), wq = W(i, q);
                    W(i, p) = c * wp - s * wq;
                    W(i, q) = s * wp + c * wq;
                }
            }
        }
        if (off < 1e-15) break;
    }

    Vec sv(n);
    for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(std::max(coldot(j, j), 0.0));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

Vec solve_spd(const Mat& S, const Vec& b) {
    if (S.rows != S.cols || b.size() != S.rows)
        throw std::invalid_argument("solve_spd: shape mismatch");
    const std::size_t n = S.rows;
    Mat L(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = S(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
            if (i == j) {
                if (acc <= 0.0)
                    throw std::runtime_error("solve_spd: matrix not positive definite");
                L(i, i) = std::sqrt(acc);
            } else {
                L(i, j) = acc / L(j, j);
            }
        }
    }
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t k = 0; k < i; ++k) acc -= L(i, k) * y[k];
        y[i] = acc / L(i, i);
    }
    Vec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= L(k, ii) * x[k];
        x[ii] = acc / L(ii, ii);
    }
    return x;
}

Vec lstsq(const Mat& J, const Vec& r) {
    const Mat Jt = transpose(J);
    const Mat S = matmul(Jt, J);
    const Vec b = matvec(Jt, r);
    return solve_spd(S, b);
}

}  // namespace dipg
