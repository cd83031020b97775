#pragma once

// Counter-based deterministic random streams. A stream is identified by
// (seed, stream id); draws are pure functions of (seed, stream, counter),
// so adding trials or reordering consumers never perturbs other streams.
// Stream ids are derived from names via FNV-1a.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace dipg {

constexpr std::uint64_t fnv1a(std::string_view s,
                              std::uint64_t h = 0xcbf29ce484222325ull) {
    for (char ch : s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(ch));
        h *= 0x100000001b3ull;
    }
    return h;
}

class Rng {
public:
    Rng(std::uint64_t seed, std::string_view stream_name)
        : state_(mix(seed ^ fnv1a(stream_name))) {}
    Rng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [lo, hi] inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // standard normal via Box-Muller (two uniforms per draw, no caching, so
    // the stream stays a pure function of the counter)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace dipg
