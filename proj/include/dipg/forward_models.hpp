#pragma once

// Differentiable forward problems and the shared box projector. Heat-1D is
// explicit-Euler diffusion with insulated ends (linear, symmetric); the
// damped oscillator integrates x'' + 2*zeta*omega*x' + omega^2*x = 0 with
// classical RK4 and carries the tangent-linear system alongside for exact
// JVPs of the discrete map.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dipg/deceptron.hpp"
#include "dipg/linalg.hpp"
#include "dipg/rng.hpp"

namespace dipg {

class DifferentiableMap {
public:
    virtual ~DifferentiableMap() = default;
    virtual std::size_t d_in() const = 0;
    virtual std::size_t d_out() const = 0;
    virtual Vec apply(const Vec& x) const = 0;
    virtual Vec jvp(const Vec& x, const Vec& v) const = 0;
    virtual Vec vjp(const Vec& x, const Vec& u) const = 0;
};

enum class Difficulty { Easy, Medium, Hard };

Difficulty difficulty_from_string(const std::string& s);
const char* to_string(Difficulty d);

class Heat1D final : public DifferentiableMap {
public:
    Heat1D(std::size_t n, double r, int steps, double noise_std);
    static Heat1D preset(Difficulty d);

    std::size_t d_in() const override { return n_; }
    std::size_t d_out() const override { return n_; }
    Vec apply(const Vec& x) const override;
    // Linear map: jvp(x, v) = apply(v); the stencil is symmetric so the
    // adjoint is the same sweep.
    Vec jvp(const Vec& x, const Vec& v) const override;
    Vec vjp(const Vec& x, const Vec& u) const override;

    // Dense A = M^steps, for oracle tests and conditioning checks.
    Mat dense() const;

    std::size_t n() const { return n_; }
    double r() const { return r_; }
    int steps() const { return steps_; }
    double noise_std() const { return noise_std_; }

private:
    std::size_t n_;
    double r_;
    int steps_;
    double noise_std_;
};

struct OscState {
    double x, v;
};

class DampedOscillator final : public DifferentiableMap {
public:
    DampedOscillator(std::size_t m_samples, double t_end, double rk4_dt,
                     double noise_std);
    static DampedOscillator preset();

    std::size_t d_in() const override { return 4; }  // (omega, zeta, x0, v0)
    std::size_t d_out() const override { return m_; }
    Vec apply(const Vec& theta) const override;
    Vec jvp(const Vec& theta, const Vec& v4) const override;
    // Assembles the m x 4 Jacobian from 4 unit-direction JVPs.
    Vec vjp(const Vec& theta, const Vec& u) const override;

    // Positions and velocities at the sample times (for energy checks).
    std::vector<OscState> trajectory(const Vec& theta) const;

    std::size_t m_samples() const { return m_; }
    double t_end() const { return t_end_; }
    double noise_std() const { return noise_std_; }

private:
    std::size_t m_;
    double t_end_;
    double rk4_dt_;
    double noise_std_;
    int substeps_;  // RK4 steps per sample interval
};

struct BoxProjector {
    Vec lower, upper;
    Vec project(const Vec& x) const;
};

// Task priors. Heat: 1-3 Gaussian bumps, heights U[0.5,1]*amp,
// widths U[0.05,0.15] (fraction of the domain), clipped to [0, amp].
struct HeatPrior {
    std::size_t n = 64;
    double amp = 12.0;
    Vec sample(Rng& rng) const;
    BoxProjector box() const;
};

// Oscillator: uniform over the parameter box.
struct OscPrior {
    Vec lower{0.5, 0.05, -6.0, -6.0};
    Vec upper{5.0, 0.9, 6.0, 6.0};
    Vec sample(Rng& rng) const;
    BoxProjector box() const;
};

struct Dataset {
    std::vector<Vec> xs;
    std::vector<Vec> ys;  // unnormalized
};

// y* = apply(x) + N(0, noise_std^2) per component; z-scoring happens later
// against the training normalizer.
template <typename Prior>
Dataset make_dataset(const DifferentiableMap& model, const Prior& prior,
                     std::size_t n_samples, double noise_std,
                     std::uint64_t seed) {
    if (n_samples < 2)
        throw std::invalid_argument("make_dataset: need at least 2 samples");
    Dataset ds;
    ds.xs.reserve(n_samples);
    ds.ys.reserve(n_samples);
    Rng xr(seed, "dataset-x");
    Rng nr(seed, "dataset-noise");
    for (std::size_t i = 0; i < n_samples; ++i) {
        Vec x = prior.sample(xr);
        Vec y = model.apply(x);
        for (double& v : y) v += noise_std * nr.normal();
        ds.xs.push_back(std::move(x));
        ds.ys.push_back(std::move(y));
    }
    return ds;
}

// Adapter exposing a trained module's forward map as a DifferentiableMap.
class DeceptronSurrogate final : public DifferentiableMap {
public:
    explicit DeceptronSurrogate(DeceptronParams p) : p_(std::move(p)) {}
    std::size_t d_in() const override { return p_.d_in(); }
    std::size_t d_out() const override { return p_.d_out(); }
    Vec apply(const Vec& x) const override { return forward(p_, x); }
    Vec jvp(const Vec& x, const Vec& v) const override { return jvp_f(p_, x, v); }
    Vec vjp(const Vec& x, const Vec& u) const override { return vjp_f(p_, x, u); }
    const DeceptronParams& params() const { return p_; }

private:
    DeceptronParams p_;
};

}  // namespace dipg
