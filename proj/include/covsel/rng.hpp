#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace covsel {

/// Deterministic 64-bit generator (xoshiro256++) with splittable streams.
///
/// Replicate r of a Monte Carlo run draws from `Rng::stream(master, r)`,
/// so results are independent of evaluation order and thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
    }

    /// Substream `idx` of a master seed. Distinct (master, idx) pairs give
    /// decorrelated generators; the mapping is pure and stable.
    static Rng stream(std::uint64_t master, std::uint64_t idx) {
        std::uint64_t x = master ^ 0x6a09e667f3bcc909ull;
        std::uint64_t h = splitmix64(x);
        x = h ^ (idx + 0x9e3779b97f4a7c15ull);
        Rng r(0);
        for (auto& w : r.state_) w = splitmix64(x);
        return r;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (cosine branch only; no cached state).
    double normal() {
        const double u1 = (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

}  // namespace covsel
