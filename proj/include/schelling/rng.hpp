#pragma once

#include <cstdint>
#include <random>

namespace schelling {

// All randomness in the library flows through std::mt19937_64, which has a
// fully specified algorithm, so traces are bit-reproducible across platforms.
using Rng = std::mt19937_64;

// splitmix64 step (Vigna). Used to expand user seeds into generator state so
// that small consecutive seeds still give well-separated streams.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline Rng make_rng(uint64_t seed) {
    uint64_t s = seed;
    return Rng(splitmix64(s));
}

// Uniform double in [0, 1) from the top 53 bits of one draw. We avoid
// std::uniform_real_distribution because its output is implementation-defined.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound). bound must be positive and well below 2^53,
// so floor(u * bound) < bound holds exactly.
inline int uniform_index(Rng& rng, int bound) {
    return static_cast<int>(uniform_unit(rng) * static_cast<double>(bound));
}

} // namespace schelling
