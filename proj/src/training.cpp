#include "dipg/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numeric>

namespace dipg {

void LossWeights::validate() const {
    const double vals[] = {lambda_task, lambda_rec, lambda_cyc, beta_spec,
                           lambda_tie,  lambda_comp, lambda_jcp};
    for (double v : vals)
        if (v < 0.0) throw ConfigError("loss weights must be nonnegative");
}

std::vector<Vec> sample_probes(const ProbeConfig& cfg, std::size_t dim, Rng& rng) {
    if (cfg.count < 1 || cfg.count > 4)
        throw ConfigError("probe count must lie in [1,4]");
    if (dim < 1) throw ConfigError("probe dimension must be at least 1");
    std::vector<Vec> probes(cfg.count, Vec(dim));
    for (auto& xi : probes)
        for (double& v : xi)
            v = (cfg.kind == ProbeKind::Rademacher) ? rng.rademacher() : rng.normal();
    return probes;
}

Vec Normalizer::apply(const Vec& y) const {
    Vec z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = (y[i] - mean[i]) / std[i];
    return z;
}

Vec Normalizer::invert(const Vec& z) const {
    Vec y(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) y[i] = z[i] * std[i] + mean[i];
    return y;
}

Normalizer fit_normalizer(const std::vector<Vec>& ys) {
    if (ys.empty()) throw ConfigError("fit_normalizer: empty dataset");
    const std::size_t d = ys[0].size();
    Normalizer n;
    n.mean.assign(d, 0.0);
    n.std.assign(d, 0.0);
    for (const Vec& y : ys) kern::axpy(1.0, y.data(), n.mean.data(), d);
    kern::scal(1.0 / static_cast<double>(ys.size()), n.mean.data(), d);
    for (const Vec& y : ys)
        for (std::size_t i = 0; i < d; ++i) {
            const double dlt = y[i] - n.mean[i];
            n.std[i] += dlt * dlt;
        }
    for (std::size_t i = 0; i < d; ++i)
        n.std[i] = std::max(std::sqrt(n.std[i] / static_cast<double>(ys.size())), 1e-8);
    return n;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

constexpr char kNormMagic[8] = {'D', 'I', 'P', 'G', 'N', 'O', 'R', 'M'};

}  // namespace

void save_normalizer(const Normalizer& n, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::unique_ptr<std::FILE, FileCloser> f(std::fopen(tmp.c_str(), "wb"));
        if (!f) throw std::runtime_error("normalizer: cannot open " + tmp);
        std::fwrite(kNormMagic, 1, 8, f.get());
        const std::uint32_t d = static_cast<std::uint32_t>(n.mean.size());
        std::fwrite(&d, 4, 1, f.get());
        std::fwrite(n.mean.data(), 8, d, f.get());
        std::fwrite(n.std.data(), 8, d, f.get());
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("normalizer: rename failed for " + path);
}

Normalizer load_normalizer(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("normalizer: cannot open " + path);
    char magic[8];
    if (std::fread(magic, 1, 8, f.get()) != 8 || std::memcmp(magic, kNormMagic, 8) != 0)
        throw std::runtime_error("normalizer: bad magic in " + path);
    std::uint32_t d = 0;
    if (std::fread(&d, 4, 1, f.get()) != 1)
        throw std::runtime_error("normalizer: short read");
    Normalizer n;
    n.mean.assign(d, 0.0);
    n.std.assign(d, 0.0);
    if (std::fread(n.mean.data(), 8, d, f.get()) != d ||
        std::fread(n.std.data(), 8, d, f.get()) != d)
        throw std::runtime_error("normalizer: short read");
    return n;
}

namespace {

// Fused per-batch loss/gradient evaluation. Scratch buffers live here so the
// epoch loop does no per-sample allocation.
struct Workspace {
    Vec z1, a1, e1, z2, a2, e2, ebk, z3, a3, z4, a4, e4, e3;
    Vec s, t, v, u, q, dq, vt;

    void resize(std::size_t din, std::size_t dout) {
        z1.resize(dout);
        a1.resize(dout);
        e1.resize(dout);
        z2.resize(din);
        a2.resize(din);
        e2.resize(din);
        ebk.resize(dout);
        z3.resize(din);
        a3.resize(din);
        z4.resize(dout);
        a4.resize(dout);
        e4.resize(dout);
        e3.resize(din);
        s.resize(dout);
        t.resize(dout);
        v.resize(din);
        u.resize(din);
        q.resize(din);
        dq.resize(din);
        vt.resize(dout);
    }
};

void affine_into(const Mat& M, const Vec& x, const Vec& bias, Vec& out) {
    kern::matvec(M.data(), M.rows, M.cols, x.data(), out.data());
    kern::axpy(1.0, bias.data(), out.data(), out.size());
}

double sq_diff(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// Shared core of total_loss / loss_gradient. When grads == nullptr only the
// breakdown is computed.
LossTerms eval_batch(const DeceptronParams& p, const std::vector<Vec>& xs,
                     const std::vector<Vec>& ys, const std::vector<Vec>& ytilde,
                     const LossWeights& w, const std::vector<Vec>& probes,
                     Grads* grads) {
    w.validate();
    validate_shapes(p);
    if (xs.size() != ys.size() || (w.lambda_cyc > 0 && ytilde.size() != xs.size()))
        throw std::invalid_argument("loss: batch size mismatch");
    if (xs.empty()) throw std::invalid_argument("loss: empty batch");

    const std::size_t din = p.d_in(), dout = p.d_out();
    const std::size_t B = xs.size();
    const double invB = 1.0 / static_cast<double>(B);
    const double sf = p.slope_f, sg = p.slope_g;

    if (grads) {
        grads->dW = Mat(dout, din);
        grads->db.assign(dout, 0.0);
        grads->dV = Mat(din, dout);
        grads->dc.assign(din, 0.0);
    }

    Workspace ws;
    ws.resize(din, dout);
    LossTerms terms;

    const bool need_rec_path = w.lambda_rec > 0 || w.lambda_jcp > 0;

    for (std::size_t bi = 0; bi < B; ++bi) {
        const Vec& x = xs[bi];
        const Vec& ystar = ys[bi];
        if (x.size() != din || ystar.size() != dout)
            throw std::invalid_argument("loss: sample shape mismatch");

        affine_into(p.W, x, p.b, ws.z1);
        kern::leaky(ws.z1.data(), ws.a1.data(), dout, sf);

        // task
        terms.task += w.lambda_task * sq_diff(ws.a1, ystar) * invB;
        if (grads && w.lambda_task > 0) {
            for (std::size_t i = 0; i < dout; ++i)
                ws.e1[i] = 2.0 * w.lambda_task * (ws.a1[i] - ystar[i]) * invB;
            kern::leaky_mask(ws.z1.data(), ws.e1.data(), ws.e1.data(), dout, sf);
            kern::ger(grads->dW.data(), dout, din, 1.0, ws.e1.data(), x.data());
            kern::axpy(1.0, ws.e1.data(), grads->db.data(), dout);
        }

        // reconstruction g(f(x)) ~ x (z2/a2 also feed the JCP mask)
        if (need_rec_path) {
            affine_into(p.V, ws.a1, p.c, ws.z2);
            kern::leaky(ws.z2.data(), ws.a2.data(), din, sg);
        }
        if (w.lambda_rec > 0) {
            terms.rec += w.lambda_rec * sq_diff(ws.a2, x) * invB;
            if (grads) {
                for (std::size_t i = 0; i < din; ++i)
                    ws.e2[i] = 2.0 * w.lambda_rec * (ws.a2[i] - x[i]) * invB;
                kern::leaky_mask(ws.z2.data(), ws.e2.data(), ws.e2.data(), din, sg);
                kern::ger(grads->dV.data(), din, dout, 1.0, ws.e2.data(), ws.a1.data());
                kern::axpy(1.0, ws.e2.data(), grads->dc.data(), din);
                kern::matvec_t(p.V.data(), din, dout, ws.e2.data(), ws.ebk.data());
                kern::leaky_mask(ws.z1.data(), ws.ebk.data(), ws.ebk.data(), dout, sf);
                kern::ger(grads->dW.data(), dout, din, 1.0, ws.ebk.data(), x.data());
                kern::axpy(1.0, ws.ebk.data(), grads->db.data(), dout);
            }
        }

        // cycle f(g(yt)) ~ yt
        if (w.lambda_cyc > 0) {
            const Vec& yt = ytilde[bi];
            affine_into(p.V, yt, p.c, ws.z3);
            kern::leaky(ws.z3.data(), ws.a3.data(), din, sg);
            affine_into(p.W, ws.a3, p.b, ws.z4);
            kern::leaky(ws.z4.data(), ws.a4.data(), dout, sf);
            terms.cyc += w.lambda_cyc * sq_diff(ws.a4, yt) * invB;
            if (grads) {
                for (std::size_t i = 0; i < dout; ++i)
                    ws.e4[i] = 2.0 * w.lambda_cyc * (ws.a4[i] - yt[i]) * invB;
                kern::leaky_mask(ws.z4.data(), ws.e4.data(), ws.e4.data(), dout, sf);
                kern::ger(grads->dW.data(), dout, din, 1.0, ws.e4.data(), ws.a3.data());
                kern::axpy(1.0, ws.e4.data(), grads->db.data(), dout);
                kern::matvec_t(p.W.data(), dout, din, ws.e4.data(), ws.e3.data());
                kern::leaky_mask(ws.z3.data(), ws.e3.data(), ws.e3.data(), din, sg);
                kern::ger(grads->dV.data(), din, dout, 1.0, ws.e3.data(), yt.data());
                kern::axpy(1.0, ws.e3.data(), grads->dc.data(), din);
            }
        }

        // JCP: || J_g(f(x)) J_f(x) xi - xi ||^2, masks held constant
        if (w.lambda_jcp > 0 && !probes.empty()) {
            const double invK = 1.0 / static_cast<double>(probes.size());
            for (const Vec& xi : probes) {
                kern::matvec(p.W.data(), dout, din, xi.data(), ws.s.data());
                kern::leaky_mask(ws.z1.data(), ws.s.data(), ws.t.data(), dout, sf);
                kern::matvec(p.V.data(), din, dout, ws.t.data(), ws.v.data());
                kern::leaky_mask(ws.z2.data(), ws.v.data(), ws.u.data(), din, sg);
                double nq = 0.0;
                for (std::size_t i = 0; i < din; ++i) {
                    ws.q[i] = ws.u[i] - xi[i];
                    nq += ws.q[i] * ws.q[i];
                }
                terms.jcp += w.lambda_jcp * invK * invB * nq;
                if (grads) {
                    const double coef = 2.0 * w.lambda_jcp * invK * invB;
                    kern::leaky_mask(ws.z2.data(), ws.q.data(), ws.dq.data(), din, sg);
                    kern::ger(grads->dV.data(), din, dout, coef, ws.dq.data(),
                              ws.t.data());
                    kern::matvec_t(p.V.data(), din, dout, ws.dq.data(), ws.vt.data());
                    kern::leaky_mask(ws.z1.data(), ws.vt.data(), ws.vt.data(), dout, sf);
                    kern::ger(grads->dW.data(), dout, din, coef, ws.vt.data(),
                              xi.data());
                }
            }
        }
    }

    // parameter-only penalties (constant over the batch)
    const PenaltyValues pv = penalties(p);
    terms.spec = w.beta_spec * pv.spec;
    terms.tie = w.lambda_tie * pv.tie;
    terms.comp = w.lambda_comp * pv.comp;
    if (grads) {
        if (w.beta_spec > 0) {
            Mat S = matmul(transpose(p.W), p.W);
            for (std::size_t i = 0; i < din; ++i) S(i, i) -= 1.0;
            const Mat WS = matmul(p.W, S);
            kern::axpy(4.0 * w.beta_spec, WS.data(), grads->dW.data(), WS.a.size());
        }
        if (w.lambda_tie > 0 && din == dout) {
            for (std::size_t i = 0; i < dout; ++i) {
                const double s2 = 2.0 * w.lambda_tie * (p.b[i] + p.c[i]);
                grads->db[i] += s2;
                grads->dc[i] += s2;
            }
        }
        if (w.lambda_comp > 0) {
            Mat E = matmul(p.V, p.W);
            for (std::size_t i = 0; i < din; ++i) E(i, i) -= 1.0;
            const Mat EWt = matmul(E, transpose(p.W));
            kern::axpy(2.0 * w.lambda_comp, EWt.data(), grads->dV.data(), EWt.a.size());
            const Mat VtE = matmul(transpose(p.V), E);
            kern::axpy(2.0 * w.lambda_comp, VtE.data(), grads->dW.data(), VtE.a.size());
        }
    }
    return terms;
}

struct AdamState {
    Vec m, v;
    void init(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
    }
    void step(double* param, const double* grad, std::size_t n, double lr, int t) {
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, t);
        const double bc2 = 1.0 - std::pow(b2, t);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
};

double holdout_rjcp(const DeceptronParams& p, const std::vector<Vec>& xs,
                    std::size_t begin, std::size_t end, int k, Rng& rng) {
    if (begin >= end) return 0.0;
    double acc = 0.0;
    Vec xi(p.d_in());
    for (std::size_t i = begin; i < end; ++i) {
        double per_point = 0.0;
        for (int j = 0; j < k; ++j) {
            for (double& v : xi) v = rng.rademacher();
            per_point += jcp_probe(p, xs[i], xi);
        }
        acc += per_point / k;
    }
    return acc / static_cast<double>(end - begin);
}

}  // namespace

LossTerms total_loss(const DeceptronParams& p, const std::vector<Vec>& xs,
                     const std::vector<Vec>& ys, const std::vector<Vec>& ytilde,
                     const LossWeights& w, const std::vector<Vec>& probes) {
    return eval_batch(p, xs, ys, ytilde, w, probes, nullptr);
}

LossTerms loss_gradient(const DeceptronParams& p, const std::vector<Vec>& xs,
                        const std::vector<Vec>& ys, const std::vector<Vec>& ytilde,
                        const LossWeights& w, const std::vector<Vec>& probes,
                        Grads& out) {
    return eval_batch(p, xs, ys, ytilde, w, probes, &out);
}

TrainResult train(const std::vector<Vec>& xs, const std::vector<Vec>& ys,
                  const TrainConfig& cfg, const LossWeights& w,
                  const ProbeConfig& probe_cfg) {
    w.validate();
    if (xs.empty() || xs.size() != ys.size()) throw ConfigError("train: bad dataset");
    if (cfg.epochs < 0) throw ConfigError("train: epochs must be nonnegative");
    if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be positive");
    if (cfg.epochs > 0 && cfg.jcp_warmup_epoch > cfg.epochs)
        throw ConfigError("train: jcp_warmup_epoch exceeds epochs");

    const std::size_t n = xs.size();
    const std::size_t n_train = std::max<std::size_t>(1, (n * 9) / 10);
    const std::size_t din = xs[0].size(), dout = ys[0].size();

    Rng init_rng(cfg.seed, "init");
    DeceptronParams p = init_deceptron(din, dout, cfg.slope_f, cfg.slope_g, init_rng);

    Rng shuffle_rng(cfg.seed, "shuffle");
    Rng probe_rng(probe_cfg.seed != 0 ? probe_cfg.seed : cfg.seed, "probes");
    Rng ytilde_rng(cfg.seed, "ytilde");
    Rng rjcp_rng(cfg.seed, "rjcp-holdout");

    AdamState aW, ab, aV, ac;
    aW.init(p.W.a.size());
    ab.init(p.b.size());
    aV.init(p.V.a.size());
    ac.init(p.c.size());
    int adam_t = 0;

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    TrainResult res;
    res.report.rows.reserve(cfg.epochs);

    const std::size_t traj_pts =
        std::min<std::size_t>(std::max(cfg.rjcp_trajectory_points, 1),
                              n > n_train ? n - n_train : 0);

    std::vector<Vec> bx, by, byt;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates on the training indices
        for (std::size_t i = n_train; i-- > 1;) {
            const std::size_t j =
                static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i)));
            std::swap(order[i], order[j]);
        }
        LossWeights we = w;
        if (epoch < cfg.jcp_warmup_epoch) we.lambda_jcp = 0.0;

        LossTerms epoch_terms;
        std::size_t n_batches = 0;
        for (std::size_t s0 = 0; s0 < n_train; s0 += cfg.batch_size) {
            const std::size_t s1 = std::min(n_train, s0 + cfg.batch_size);
            bx.clear();
            by.clear();
            byt.clear();
            for (std::size_t i = s0; i < s1; ++i) {
                bx.push_back(xs[order[i]]);
                by.push_back(ys[order[i]]);
            }
            if (we.lambda_cyc > 0) {
                for (const Vec& x : bx) {
                    Vec yt = forward(p, x);
                    for (double& v : yt) v += cfg.ytilde_noise_std * ytilde_rng.normal();
                    byt.push_back(std::move(yt));
                }
            }
            const std::vector<Vec> probes =
                (we.lambda_jcp > 0) ? sample_probes(probe_cfg, din, probe_rng)
                                    : std::vector<Vec>{};

            Grads g;
            const LossTerms terms = loss_gradient(p, bx, by, byt, we, probes, g);
            if (!std::isfinite(terms.total()))
                throw NumericalError("train: loss became non-finite at epoch " +
                                     std::to_string(epoch));

            if (cfg.tie_v_wt) {
                // fold dV into dW through V = W^T
                for (std::size_t i = 0; i < g.dV.rows; ++i)
                    for (std::size_t j = 0; j < g.dV.cols; ++j)
                        g.dW(j, i) += g.dV(i, j);
            }

            ++adam_t;
            if (cfg.optimizer == Optimizer::Adam) {
                aW.step(p.W.data(), g.dW.data(), p.W.a.size(), cfg.learning_rate, adam_t);
                ab.step(p.b.data(), g.db.data(), p.b.size(), cfg.learning_rate, adam_t);
                if (!cfg.tie_v_wt) {
                    aV.step(p.V.data(), g.dV.data(), p.V.a.size(), cfg.learning_rate, adam_t);
                }
                ac.step(p.c.data(), g.dc.data(), p.c.size(), cfg.learning_rate, adam_t);
            } else {
                kern::axpy(-cfg.learning_rate, g.dW.data(), p.W.data(), p.W.a.size());
                kern::axpy(-cfg.learning_rate, g.db.data(), p.b.data(), p.b.size());
                if (!cfg.tie_v_wt)
                    kern::axpy(-cfg.learning_rate, g.dV.data(), p.V.data(), p.V.a.size());
                kern::axpy(-cfg.learning_rate, g.dc.data(), p.c.data(), p.c.size());
            }
            if (cfg.tie_v_wt) p.V = transpose(p.W);

            epoch_terms.task += terms.task;
            epoch_terms.rec += terms.rec;
            epoch_terms.cyc += terms.cyc;
            epoch_terms.spec += terms.spec;
            epoch_terms.tie += terms.tie;
            epoch_terms.comp += terms.comp;
            epoch_terms.jcp += terms.jcp;
            ++n_batches;
        }
        const double inv = n_batches ? 1.0 / static_cast<double>(n_batches) : 0.0;
        epoch_terms.task *= inv;
        epoch_terms.rec *= inv;
        epoch_terms.cyc *= inv;
        epoch_terms.spec *= inv;
        epoch_terms.tie *= inv;
        epoch_terms.comp *= inv;
        epoch_terms.jcp *= inv;

        const double rj =
            holdout_rjcp(p, xs, n_train, n_train + traj_pts, 2, rjcp_rng);
        res.report.rows.push_back({epoch, epoch_terms, rj});
    }

    // full-holdout diagnostics
    Rng final_rng(cfg.seed, "rjcp-final");
    res.report.final_rjcp_holdout = holdout_rjcp(p, xs, n_train, n, 4, final_rng);
    double se = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = n_train; i < n; ++i) {
        const Vec pred = forward(p, xs[i]);
        se += sq_diff(pred, ys[i]);
        cnt += pred.size();
    }
    res.report.final_validation_rmse = cnt ? std::sqrt(se / cnt) : 0.0;

    res.params = std::move(p);
    return res;
}

}  // namespace dipg
