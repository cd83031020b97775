#include "dipg/forward_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dipg {

Difficulty difficulty_from_string(const std::string& s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    if (s == "hard") return Difficulty::Hard;
    throw std::invalid_argument("unknown difficulty: " + s);
}

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        default: return "hard";
    }
}

Heat1D::Heat1D(std::size_t n, double r, int steps, double noise_std)
    : n_(n), r_(r), steps_(steps), noise_std_(noise_std) {
    if (r > 0.5)
        throw std::invalid_argument("Heat1D: r > 0.5 violates explicit-Euler stability");
    if (n < 2 || steps < 0) throw std::invalid_argument("Heat1D: bad shape");
}

Heat1D Heat1D::preset(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return Heat1D(64, 0.25, 20, 0.05);
        case Difficulty::Medium: return Heat1D(64, 0.25, 40, 0.12);
        default: return Heat1D(64, 0.25, 60, 0.25);
    }
}

Vec Heat1D::apply(const Vec& x) const {
    if (x.size() != n_) throw std::invalid_argument("Heat1D::apply: length mismatch");
    Vec cur = x, next(n_);
    for (int s = 0; s < steps_; ++s) {
        kern::heat_step(cur.data(), next.data(), n_, r_);
        cur.swap(next);
    }
    return cur;
}

Vec Heat1D::jvp(const Vec&, const Vec& v) const { return apply(v); }
Vec Heat1D::vjp(const Vec&, const Vec& u) const { return apply(u); }

Mat Heat1D::dense() const {
    Mat A(n_, n_);
    Vec e(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        e[j] = 1.0;
        const Vec col = apply(e);
        for (std::size_t i = 0; i < n_; ++i) A(i, j) = col[i];
        e[j] = 0.0;
    }
    return A;
}

DampedOscillator::DampedOscillator(std::size_t m_samples, double t_end,
                                   double rk4_dt, double noise_std)
    : m_(m_samples), t_end_(t_end), rk4_dt_(rk4_dt), noise_std_(noise_std) {
    if (m_samples < 1 || t_end <= 0.0 || rk4_dt <= 0.0)
        throw std::invalid_argument("DampedOscillator: bad configuration");
    const double sample_dt = t_end / static_cast<double>(m_samples);
    substeps_ = std::max(1, static_cast<int>(std::ceil(sample_dt / rk4_dt)));
}

DampedOscillator DampedOscillator::preset() {
    return DampedOscillator(40, 1.5, 1e-3, 0.01);
}

namespace {

// State s = (x, v, dx, dv): dynamics plus the tangent-linear system for a
// fixed parameter direction (domega, dzeta). Freezing the direction keeps
// the augmented rhs autonomous so plain RK4 differentiates the discrete map
// exactly.
struct Aug {
    double x, v, dx, dv;
};

inline Aug rhs(const Aug& s, double omega, double zeta, double domega,
               double dzeta) {
    Aug d;
    d.x = s.v;
    d.v = -2.0 * zeta * omega * s.v - omega * omega * s.x;
    d.dx = s.dv;
    d.dv = -2.0 * zeta * omega * s.dv - omega * omega * s.dx -
           (2.0 * zeta * s.v + 2.0 * omega * s.x) * domega -
           2.0 * omega * s.v * dzeta;
    return d;
}

inline Aug step_rk4(const Aug& s, double h, double omega, double zeta,
                    double domega, double dzeta) {
    const Aug k1 = rhs(s, omega, zeta, domega, dzeta);
    Aug t{s.x + 0.5 * h * k1.x, s.v + 0.5 * h * k1.v, s.dx + 0.5 * h * k1.dx,
          s.dv + 0.5 * h * k1.dv};
    const Aug k2 = rhs(t, omega, zeta, domega, dzeta);
    t = {s.x + 0.5 * h * k2.x, s.v + 0.5 * h * k2.v, s.dx + 0.5 * h * k2.dx,
         s.dv + 0.5 * h * k2.dv};
    const Aug k3 = rhs(t, omega, zeta, domega, dzeta);
    t = {s.x + h * k3.x, s.v + h * k3.v, s.dx + h * k3.dx, s.dv + h * k3.dv};
    const Aug k4 = rhs(t, omega, zeta, domega, dzeta);
    return {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
            s.v + h / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v),
            s.dx + h / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx),
            s.dv + h / 6.0 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv)};
}

}  // namespace

std::vector<OscState> DampedOscillator::trajectory(const Vec& theta) const {
    if (theta.size() != 4)
        throw std::invalid_argument("DampedOscillator: theta must be (omega, zeta, x0, v0)");
    const double omega = theta[0], zeta = theta[1];
    if (omega <= 0.0) throw std::domain_error("DampedOscillator: omega must be positive");
    if (zeta < 0.0) throw std::domain_error("DampedOscillator: zeta must be nonnegative");
    const double sample_dt = t_end_ / static_cast<double>(m_);
    const double h = sample_dt / static_cast<double>(substeps_);
    Aug s{theta[2], theta[3], 0.0, 0.0};
    std::vector<OscState> out;
    out.reserve(m_);
    for (std::size_t j = 0; j < m_; ++j) {
        for (int k = 0; k < substeps_; ++k) s = step_rk4(s, h, omega, zeta, 0.0, 0.0);
        out.push_back({s.x, s.v});
    }
    return out;
}

Vec DampedOscillator::apply(const Vec& theta) const {
    const auto traj = trajectory(theta);
    Vec y(m_);
    for (std::size_t j = 0; j < m_; ++j) y[j] = traj[j].x;
    return y;
}

Vec DampedOscillator::jvp(const Vec& theta, const Vec& v4) const {
    if (theta.size() != 4 || v4.size() != 4)
        throw std::invalid_argument("DampedOscillator::jvp: length mismatch");
    const double omega = theta[0], zeta = theta[1];
    if (omega <= 0.0) throw std::domain_error("DampedOscillator: omega must be positive");
    const double sample_dt = t_end_ / static_cast<double>(m_);
    const double h = sample_dt / static_cast<double>(substeps_);
    Aug s{theta[2], theta[3], v4[2], v4[3]};
    Vec out(m_);
    for (std::size_t j = 0; j < m_; ++j) {
        for (int k = 0; k < substeps_; ++k)
            s = step_rk4(s, h, omega, zeta, v4[0], v4[1]);
        out[j] = s.dx;
    }
    return out;
}

Vec DampedOscillator::vjp(const Vec& theta, const Vec& u) const {
    if (u.size() != m_)
        throw std::invalid_argument("DampedOscillator::vjp: length mismatch");
    Vec out(4, 0.0);
    Vec e(4, 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
        e[k] = 1.0;
        const Vec col = jvp(theta, e);
        out[k] = kern::dot(col.data(), u.data(), m_);
        e[k] = 0.0;
    }
    return out;
}

Vec BoxProjector::project(const Vec& x) const {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = std::min(std::max(x[i], lower[i]), upper[i]);
    return out;
}

Vec HeatPrior::sample(Rng& rng) const {
    Vec x(n, 0.0);
    const int k = static_cast<int>(rng.uniform_int(1, 3));
    for (int b = 0; b < k; ++b) {
        const double center = rng.uniform(0.0, 1.0);
        const double width = rng.uniform(0.05, 0.15);
        const double height = rng.uniform(0.5, 1.0) * amp;
        for (std::size_t i = 0; i < n; ++i) {
            const double pos = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            const double z = (pos - center) / width;
            x[i] += height * std::exp(-0.5 * z * z);
        }
    }
    for (double& v : x) v = std::min(std::max(v, 0.0), amp);
    return x;
}

BoxProjector HeatPrior::box() const {
    return BoxProjector{Vec(n, 0.0), Vec(n, amp)};
}

Vec OscPrior::sample(Rng& rng) const {
    Vec t(4);
    for (std::size_t i = 0; i < 4; ++i) t[i] = rng.uniform(lower[i], upper[i]);
    return t;
}

BoxProjector OscPrior::box() const { return BoxProjector{lower, upper}; }

}  // namespace dipg
