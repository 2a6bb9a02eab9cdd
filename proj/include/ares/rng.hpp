#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ares/vec2.hpp"

namespace ares {

// SplitMix64 finalizer. Used both as a bit mixer for seed derivation and as
// the backbone of counter-based draws that must not depend on call order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d49bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

template <typename... Rest>
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v, Rest... rest) {
    return hash_combine(hash_combine(seed, v), rest...);
}

// Stream tags keep draws for unrelated purposes statistically independent
// even when they share a trial seed.
namespace stream {
inline constexpr std::uint64_t kSpawn = 0x535041574eULL;   // "SPAWN"
inline constexpr std::uint64_t kMass = 0x4d415353ULL;      // "MASS"
inline constexpr std::uint64_t kNoise = 0x4e4f495345ULL;   // "NOISE"
inline constexpr std::uint64_t kWait = 0x57414954ULL;      // "WAIT"
inline constexpr std::uint64_t kFilter = 0x4b46ULL;        // "KF"
}  // namespace stream

// Deterministic generator with hand-rolled distribution transforms.
// std::mt19937_64 output is pinned by the standard, while the std::*_distribution
// wrappers are not; rolling the transforms here keeps every platform, and every
// thread count, byte-identical.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Marsaglia's polar method (rejection, no trig).
    double normal() {
        for (;;) {
            const double u = 2.0 * uniform01() - 1.0;
            const double v = 2.0 * uniform01() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Inverse-CDF exponential with the given mean.
    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

    // Rayleigh draw parameterised by its RMS value: P(Z <= z) = 1 - exp(-z^2/rms^2).
    double rayleigh(double rms) { return rms * std::sqrt(-std::log1p(-uniform01())); }

    // Unit vector with uniformly distributed direction.
    Vec2 unit_vector() {
        const double a = uniform(0.0, 2.0 * M_PI);
        return {std::cos(a), std::sin(a)};
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ares
