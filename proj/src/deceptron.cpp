#include "dipg/deceptron.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace dipg {

namespace {

constexpr char kMagic[8] = {'D', 'E', 'C', 'E', 'P', 'T', 'R', 'N'};
constexpr std::uint32_t kVersion = 1;

Vec affine(const Mat& M, const Vec& x, const Vec& bias) {
    Vec z = matvec(M, x);
    kern::axpy(1.0, bias.data(), z.data(), z.size());
    return z;
}

}  // namespace

DeceptronParams init_deceptron(std::size_t d_in, std::size_t d_out,
                               double slope_f, double slope_g, Rng& rng) {
    if (slope_f <= 0.0 || slope_f > 1.0 || slope_g <= 0.0 || slope_g > 1.0)
        throw std::invalid_argument("init_deceptron: slopes must lie in (0,1]");
    DeceptronParams p;
    p.W = Mat(d_out, d_in);
    p.V = Mat(d_in, d_out);
    p.b.assign(d_out, 0.0);
    p.c.assign(d_in, 0.0);
    p.slope_f = slope_f;
    p.slope_g = slope_g;
    const double lim = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
    for (double& w : p.W.a) w = rng.uniform(-lim, lim);
    p.V = transpose(p.W);
    return p;
}

void validate_shapes(const DeceptronParams& p) {
    if (p.V.rows != p.W.cols || p.V.cols != p.W.rows)
        throw std::invalid_argument("deceptron: V must have W's transposed shape");
    if (p.b.size() != p.W.rows || p.c.size() != p.V.rows)
        throw std::invalid_argument("deceptron: bias length mismatch");
    if (p.slope_f <= 0.0 || p.slope_g <= 0.0)
        throw std::invalid_argument("deceptron: slopes must be positive");
}

Vec forward(const DeceptronParams& p, const Vec& x) {
    Vec z = affine(p.W, x, p.b);
    kern::leaky(z.data(), z.data(), z.size(), p.slope_f);
    return z;
}

Vec reverse(const DeceptronParams& p, const Vec& y) {
    Vec z = affine(p.V, y, p.c);
    kern::leaky(z.data(), z.data(), z.size(), p.slope_g);
    return z;
}

Vec jvp_f(const DeceptronParams& p, const Vec& x, const Vec& xi) {
    const Vec pre = affine(p.W, x, p.b);
    Vec out = matvec(p.W, xi);
    kern::leaky_mask(pre.data(), out.data(), out.data(), out.size(), p.slope_f);
    return out;
}

Vec vjp_f(const DeceptronParams& p, const Vec& x, const Vec& u) {
    const Vec pre = affine(p.W, x, p.b);
    Vec masked(u.size());
    kern::leaky_mask(pre.data(), u.data(), masked.data(), u.size(), p.slope_f);
    return matvec_t(p.W, masked);
}

Vec jvp_g(const DeceptronParams& p, const Vec& y, const Vec& v) {
    const Vec pre = affine(p.V, y, p.c);
    Vec out = matvec(p.V, v);
    kern::leaky_mask(pre.data(), out.data(), out.data(), out.size(), p.slope_g);
    return out;
}

Vec vjp_g(const DeceptronParams& p, const Vec& y, const Vec& w) {
    const Vec pre = affine(p.V, y, p.c);
    Vec masked(w.size());
    kern::leaky_mask(pre.data(), w.data(), masked.data(), w.size(), p.slope_g);
    return matvec_t(p.V, masked);
}

PenaltyValues penalties(const DeceptronParams& p) {
    validate_shapes(p);
    PenaltyValues out;
    out.spec = frob2_minus_identity(matmul(transpose(p.W), p.W));
    out.comp = frob2_minus_identity(matmul(p.V, p.W));
    if (p.d_in() == p.d_out()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.b.size(); ++i) {
            const double s = p.b[i] + p.c[i];
            acc += s * s;
        }
        out.tie = acc;
    }
    return out;
}

double jcp_probe(const DeceptronParams& p, const Vec& x, const Vec& xi) {
    if (xi.size() != p.d_in())
        throw std::invalid_argument("jcp_probe: probe length mismatch");
    const Vec y = forward(p, x);
    const Vec u = jvp_g(p, y, jvp_f(p, x, xi));
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - xi[i];
        acc += d * d;
    }
    return acc;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

void write_or_throw(std::FILE* f, const void* p, std::size_t bytes) {
    if (std::fwrite(p, 1, bytes, f) != bytes)
        throw std::runtime_error("checkpoint: short write");
}

void read_or_throw(std::FILE* f, void* p, std::size_t bytes) {
    if (std::fread(p, 1, bytes, f) != bytes)
        throw std::runtime_error("checkpoint: short read");
}

}  // namespace

void save_checkpoint(const DeceptronParams& p, const std::string& path) {
    validate_shapes(p);
    const std::string tmp = path + ".tmp";
    {
        std::unique_ptr<std::FILE, FileCloser> f(std::fopen(tmp.c_str(), "wb"));
        if (!f) throw std::runtime_error("checkpoint: cannot open " + tmp);
        write_or_throw(f.get(), kMagic, sizeof kMagic);
        const std::uint32_t ver = kVersion;
        const std::uint32_t din = static_cast<std::uint32_t>(p.d_in());
        const std::uint32_t dout = static_cast<std::uint32_t>(p.d_out());
        write_or_throw(f.get(), &ver, 4);
        write_or_throw(f.get(), &din, 4);
        write_or_throw(f.get(), &dout, 4);
        write_or_throw(f.get(), &p.slope_f, 8);
        write_or_throw(f.get(), &p.slope_g, 8);
        write_or_throw(f.get(), p.W.data(), p.W.a.size() * 8);
        write_or_throw(f.get(), p.b.data(), p.b.size() * 8);
        write_or_throw(f.get(), p.V.data(), p.V.a.size() * 8);
        write_or_throw(f.get(), p.c.data(), p.c.size() * 8);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("checkpoint: rename failed for " + path);
}

DeceptronParams load_checkpoint(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    read_or_throw(f.get(), magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    std::uint32_t ver = 0, din = 0, dout = 0;
    read_or_throw(f.get(), &ver, 4);
    if (ver != kVersion)
        throw std::runtime_error("checkpoint: unsupported version");
    read_or_throw(f.get(), &din, 4);
    read_or_throw(f.get(), &dout, 4);
    DeceptronParams p;
    p.W = Mat(dout, din);
    p.b.assign(dout, 0.0);
    p.V = Mat(din, dout);
    p.c.assign(din, 0.0);
    read_or_throw(f.get(), &p.slope_f, 8);
    read_or_throw(f.get(), &p.slope_g, 8);
    read_or_throw(f.get(), p.W.data(), p.W.a.size() * 8);
    read_or_throw(f.get(), p.b.data(), p.b.size() * 8);
    read_or_throw(f.get(), p.V.data(), p.V.a.size() * 8);
    read_or_throw(f.get(), p.c.data(), p.c.size() * 8);
    validate_shapes(p);
    return p;
}

}  // namespace dipg
