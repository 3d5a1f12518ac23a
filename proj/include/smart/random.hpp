// Deterministic random helpers. std::uniform_*_distribution is
// implementation-defined, so all draws go through these to keep runs
// bit-reproducible across compilers.

#pragma once

#include <cstdint>
#include <random>

namespace smart {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stable seed derivation for per-pair / per-worker streams.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

// Uniform in [0, 1) with 53 bits of mantissa.
inline double rand_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Modulo bias is irrelevant here; determinism is not.
inline std::uint64_t rand_below(std::mt19937_64& gen, std::uint64_t n) {
    return gen() % n;
}

// Uniform in [lo, hi).
inline double rand_range(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * rand_unit(gen);
}

}  // namespace smart
