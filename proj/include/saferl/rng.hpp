#pragma once

#include <cstdint>
#include <random>

namespace saferl {

using Rng = std::mt19937_64;

// splitmix64: cheap, well-mixed 64-bit stream used only to derive seeds,
// never as a simulation RNG.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed plus up to two tags.
// Every stochastic component of the system (spawning, traffic decisions,
// exploration, minibatch sampling, init, shuffles) gets its own stream so
// runs are reproducible and components stay decoupled.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    s ^= tag_a * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= tag_b * 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace saferl
