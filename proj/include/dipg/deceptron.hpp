#pragma once

// Bidirectional single-layer module: forward map f(x) = sigma(Wx + b) and an
// independently parameterized reverse map g(y) = sigma_g(Vy + c) trained to
// act as f's local inverse. Activations are leaky with slope in (0,1];
// sigma'(0) is taken as 1 (right derivative). Jacobian-vector products are
// exact diagonal-mask products; no Jacobian is ever materialized.
//
// Rectangular shapes (d_out != d_in) are supported; the composition
// J_g(f(x)) J_f(x) is then d_in x d_in (left inverse). The bias-tie penalty
// ||b + c||^2 requires matching bias lengths and is defined as 0 for
// rectangular modules.

#include <cstdint>
#include <string>

#include "dipg/linalg.hpp"
#include "dipg/rng.hpp"

namespace dipg {

struct DeceptronParams {
    Mat W;        // d_out x d_in
    Vec b;        // d_out
    Mat V;        // d_in x d_out
    Vec c;        // d_in
    double slope_f = 0.9;
    double slope_g = 0.9;

    std::size_t d_in() const { return W.cols; }
    std::size_t d_out() const { return W.rows; }
};

// Glorot-range uniform W, V warm-started at W^T (then untied), zero biases.
DeceptronParams init_deceptron(std::size_t d_in, std::size_t d_out,
                               double slope_f, double slope_g, Rng& rng);

void validate_shapes(const DeceptronParams& p);

Vec forward(const DeceptronParams& p, const Vec& x);
Vec reverse(const DeceptronParams& p, const Vec& y);

// J_f(x) v = D1 W v with D1 = diag sigma'(Wx + b)
Vec jvp_f(const DeceptronParams& p, const Vec& x, const Vec& xi);
// J_f(x)^T u = W^T D1 u
Vec vjp_f(const DeceptronParams& p, const Vec& x, const Vec& u);
// J_g(y) v = D2 V v with D2 = diag sigma_g'(Vy + c)
Vec jvp_g(const DeceptronParams& p, const Vec& y, const Vec& v);
// J_g(y)^T w = V^T D2 w
Vec vjp_g(const DeceptronParams& p, const Vec& y, const Vec& w);

struct PenaltyValues {
    double spec = 0.0;  // ||W^T W - I||_F^2
    double tie = 0.0;   // ||b + c||^2 (square modules only)
    double comp = 0.0;  // ||V W - I||_F^2
};

PenaltyValues penalties(const DeceptronParams& p);

// || J_g(f(x)) J_f(x) xi - xi ||^2 via two JVPs.
double jcp_probe(const DeceptronParams& p, const Vec& x, const Vec& xi);

// Checkpoint container: 8-byte magic "DECEPTRN", u32 version, u32 d_in,
// u32 d_out, f64 slope_f, f64 slope_g, then W, b, V, c as little-endian f64
// in row-major order.
void save_checkpoint(const DeceptronParams& p, const std::string& path);
DeceptronParams load_checkpoint(const std::string& path);

}  // namespace dipg
